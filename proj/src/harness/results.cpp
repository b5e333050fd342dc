#include "ares/harness/results.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ares/core/error.hpp"
#include "ares/core/format.hpp"

namespace ares::harness {

std::vector<SolveCurve> evaluate_solve_curves(const std::vector<agents::TrialResult>& results,
                                              const std::vector<std::size_t>& cutoffs) {
  if (results.empty()) throw ContractError("no trial results to aggregate");
  std::vector<SolveCurve> curves;
  std::map<std::string, std::size_t> slot;
  std::vector<std::vector<const agents::TrialResult*>> groups;
  for (const auto& r : results) {
    auto [it, fresh] = slot.try_emplace(r.condition, curves.size());
    if (fresh) {
      curves.push_back(SolveCurve{r.condition, cutoffs, {}, {}});
      groups.emplace_back();
    }
    groups[it->second].push_back(&r);
  }
  for (std::size_t g = 0; g < curves.size(); ++g) {
    const double n = static_cast<double>(groups[g].size());
    for (std::size_t cutoff : cutoffs) {
      std::size_t solved = 0;
      for (const auto* r : groups[g]) {
        if (r->solved_at && *r->solved_at <= cutoff) ++solved;
      }
      const double p = static_cast<double>(solved) / n;
      curves[g].fraction.push_back(p);
      curves[g].stddev.push_back(std::sqrt(p * (1.0 - p)));
    }
  }
  return curves;
}

void write_csv(const CsvRun& run, std::ostream& out) {
  out << "run_id,env,condition,trial,episode,eval_return,solved_at\n";
  for (const auto& t : run.trials) {
    const std::string solved = t.solved_at ? std::to_string(*t.solved_at) : "";
    for (std::size_t e = 0; e < t.eval_returns.size(); ++e) {
      out << run.run_id << ',' << run.env << ',' << t.condition << ',' << t.trial << ',' << e + 1 << ','
          << format_double(t.eval_returns[e]) << ',' << solved << '\n';
    }
  }
  if (!out) throw IoError("failed writing CSV");
}

void emit_csv(const CsvRun& run, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(run, out);
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::size_t parse_count(const std::string& text, std::size_t line_no, const char* what) {
  const auto v = parse_double(text);
  if (!v || *v < 0 || *v != std::floor(*v)) {
    throw ParseError("CSV line " + std::to_string(line_no) + ": bad " + what + " '" + text + "'");
  }
  return static_cast<std::size_t>(*v);
}

}  // namespace

CsvRun read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "run_id,env,condition,trial,episode,eval_return,solved_at") {
    throw ParseError("CSV line 1: unexpected header");
  }
  CsvRun run;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != 7) throw ParseError("CSV line " + std::to_string(line_no) + ": expected 7 columns");
    if (run.trials.empty()) {
      run.run_id = cells[0];
      run.env = cells[1];
    }
    const std::size_t trial = parse_count(cells[3], line_no, "trial");
    const std::size_t episode = parse_count(cells[4], line_no, "episode");
    const auto ret = parse_double(cells[5]);
    if (!ret) throw ParseError("CSV line " + std::to_string(line_no) + ": bad eval_return '" + cells[5] + "'");
    if (run.trials.empty() || run.trials.back().condition != cells[2] || run.trials.back().trial != trial) {
      agents::TrialResult t;
      t.condition = cells[2];
      t.trial = trial;
      if (!cells[6].empty()) t.solved_at = parse_count(cells[6], line_no, "solved_at");
      run.trials.push_back(std::move(t));
    }
    auto& t = run.trials.back();
    if (episode != t.eval_returns.size() + 1) {
      throw ParseError("CSV line " + std::to_string(line_no) + ": episode " + std::to_string(episode) + " out of order");
    }
    t.eval_returns.push_back(*ret);
  }
  return run;
}

CsvRun parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in);
}

void write_plot_data(const std::vector<SolveCurve>& curves, std::ostream& out) {
  out << "condition\tcutoff\tmean\tlower\tupper\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.cutoffs.size(); ++i) {
      const double lo = std::clamp(c.fraction[i] - c.stddev[i], 0.0, 1.0);
      const double hi = std::clamp(c.fraction[i] + c.stddev[i], 0.0, 1.0);
      out << c.condition << '\t' << c.cutoffs[i] << '\t' << format_double(c.fraction[i]) << '\t' << format_double(lo)
          << '\t' << format_double(hi) << '\n';
    }
  }
  if (!out) throw IoError("failed writing plot data");
}

void emit_plot_data(const std::vector<SolveCurve>& curves, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_plot_data(curves, out);
}

}  // namespace ares::harness
