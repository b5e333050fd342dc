#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ares/agents/train.hpp"

namespace ares::harness {

struct SolveCurve {
  std::string condition;
  std::vector<std::size_t> cutoffs;
  std::vector<double> fraction;  // trials solved within each cutoff
  std::vector<double> stddev;    // population standard deviation across trials
};

// One curve per condition, in order of first appearance. Throws
// ContractError on empty results.
std::vector<SolveCurve> evaluate_solve_curves(const std::vector<agents::TrialResult>& results,
                                              const std::vector<std::size_t>& cutoffs);

struct CsvRun {
  std::string run_id;
  std::string env;
  std::vector<agents::TrialResult> trials;
};

// Header run_id,env,condition,trial,episode,eval_return,solved_at then one
// row per episode.
void write_csv(const CsvRun& run, std::ostream& out);
void emit_csv(const CsvRun& run, const std::filesystem::path& path);
CsvRun read_csv(std::istream& in);
CsvRun parse_csv(const std::filesystem::path& path);

// Tab-separated: condition, cutoff, mean, lower, upper; bands clamped to
// [0, 1].
void write_plot_data(const std::vector<SolveCurve>& curves, std::ostream& out);
void emit_plot_data(const std::vector<SolveCurve>& curves, const std::filesystem::path& path);

}  // namespace ares::harness
