// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/reference.hpp"
#include "ares/core/format.hpp"
#include "ares/core/rng.hpp"
#include "ares/data/generate.hpp"
#include "ares/envs/cliffwalking.hpp"
#include "ares/envs/wrappers.hpp"
#include "ares/harness/experiment.hpp"
#include "ares/harness/results.hpp"
#include "ares/model/ares_model.hpp"
#include "ares/model/trainer.hpp"
#include "ares/nn/grad_check.hpp"
#include "ares/reward_map/reward_map.hpp"

using namespace ares;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path work_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "ares_acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

model::TokenSequence random_tokens(std::size_t T, std::size_t dim, Rng& rng) {
  nn::Tensor t({T, dim});
  for (double& v : t.data()) v = rng.uniform(-1, 1);
  return {t};
}

Outcome gradient_fidelity() {
  model::AresConfig c;
  c.token_dim = 3;
  c.h_dim = 8;
  c.dropout_p = 0.0;
  c.seed = 101;
  model::AresModel m(c);
  Rng rng(7);
  const auto seq = random_tokens(4, 3, rng);
  auto params = m.parameters();
  nn::zero_grad(params);
  {
    nn::Tape tape;
    tape.backward(nn::mse(m.forward(tape, seq, model::Mode::train), 0.8));
  }
  const auto r = nn::gradient_check(
      [&] {
        nn::Tape tape;
        return nn::mse(m.forward(tape, seq, model::Mode::eval), 0.8).value().item();
      },
      params, 1e-5, 1e-4);
  std::ostringstream d;
  d << "max relative error " << r.max_relative_error << " over " << r.entries_checked << " entries (worst "
    << r.worst_parameter << ")";
  return {r.max_relative_error < 1e-4 && r.entries_checked == m.parameter_count(), d.str()};
}

Outcome extraction_identity() {
  model::AresConfig c;
  c.token_dim = 5;
  c.h_dim = 32;
  c.seed = 3;
  model::AresModel m(c);
  Rng rng(11);
  std::size_t equal = 0;
  for (int i = 0; i < 100; ++i) {
    const auto seq = random_tokens(1, 5, rng);
    if (m.extract_shaped_reward(seq, 0) == m.predict_return(seq, model::Mode::eval)) ++equal;
  }
  return {equal == 100, std::to_string(equal) + "/100 bit-identical"};
}

Outcome extraction_reference() {
  model::AresConfig c;
  c.token_dim = 3;
  c.h_dim = 2;
  c.dropout_p = 0.0;
  model::AresModel m(c);
  ref::set_fixed_weights(m);
  const ref::Matrix tokens{{0.9, -0.3, 1.0}, {-1.2, 0.45, 0.0}};
  const model::TokenSequence seq{nn::Tensor::matrix({{0.9, -0.3, 1.0}, {-1.2, 0.45, 0.0}})};
  double worst = std::abs(m.predict_return(seq, model::Mode::eval) - ref::forward(m, tokens, std::nullopt).output);
  for (std::size_t t = 0; t < 2; ++t)
    worst = std::max(worst, std::abs(m.extract_shaped_reward(seq, t) - ref::forward(m, tokens, t).output));
  return {worst < 1e-10, "max abs difference " + format_double(worst)};
}

Outcome nearest_neighbor_oracle() {
  using namespace reward_map;
  Rng rng(2024);
  std::size_t mismatches = 0, queries = 0;
  for (int mode = 0; mode < 4; ++mode) {
    for (int p : {1, 2}) {
      DistanceConfig cfg;
      cfg.p_state = p;
      cfg.p_action = p;
      cfg.rounding = rounding_from_int(mode);
      std::vector<data::ShapedSample> samples;
      for (int i = 0; i < 10000; ++i) {
        samples.push_back({{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)},
                           {static_cast<double>(rng.index(4))},
                           rng.uniform(-1, 1)});
      }
      const ShapedRewardMap map = build_map(samples, cfg);
      const SplitMetric metric{3, p, p};
      for (int q = 0; q < 1000; ++q) {
        const Vec key = round_key(
            Vec{rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(-6, 6), static_cast<double>(rng.index(4))},
            cfg.rounding);
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t i = 0; i < map.size(); ++i) all.push_back({metric(map.keys()[i], key), i});
        std::partial_sort(all.begin(), all.begin() + 5, all.end());
        const auto got = map.neighbors(key, 5);
        ++queries;
        bool same = got.size() == 5;
        for (std::size_t i = 0; same && i < 5; ++i) same = got[i].index == all[i].second;
        if (!same) ++mismatches;
      }
    }
  }
  return {mismatches == 0, std::to_string(queries - mismatches) + "/" + std::to_string(queries) +
                               " queries identical (4 rounding modes x 2 norms)"};
}

Outcome reward_conservation() {
  std::size_t episodes = 0, exact = 0;
  for (const char* name : {"CliffWalking-m", "CartPole-v1"}) {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      envs::ImmediateReward imm(envs::make_env(name));
      envs::DelayedReward del(envs::make_env(name));
      Rng policy(seed);
      imm.reset(seed);
      del.reset(seed);
      std::vector<double> delayed;
      envs::StepResult ri, rd;
      do {
        const int a = static_cast<int>(policy.index(imm.spec().n_actions));
        ri = imm.step(a);
        rd = del.step(a);
        delayed.push_back(rd.reward);
      } while (!ri.done());
      ++episodes;
      if (rd.done() && data::sum_rewards(delayed) == imm.evaluation_return()) ++exact;
    }
  }
  return {exact == episodes, std::to_string(exact) + "/" + std::to_string(episodes) + " episodes exact"};
}

Outcome training_progress() {
  const auto cfg = harness::ExperimentConfig::defaults("CliffWalking-m");
  data::RandomDatasetOptions o;
  o.n_episodes = 100;
  o.seed = 1;
  o.reject_at_or_below = data::default_random_filter("CliffWalking-m");
  const envs::CliffWalkingM env;
  const data::Dataset d = data::generate_random_dataset(env, o);
  model::AresModel m(harness::ares_config(cfg, env.spec(), cfg.ares.epochs_random, 2));
  const auto report = model::train(m, d);
  const double first = report.epoch_mean_loss.front(), last = report.epoch_mean_loss.back();
  std::ostringstream s;
  s << report.epoch_mean_loss.size() << " epochs, first " << first << ", final " << last << ", ratio "
    << last / first;
  return {last < 0.1 * first, s.str()};
}

std::size_t solved_within(const std::vector<agents::TrialResult>& r, const std::string& cond, std::size_t budget) {
  std::size_t n = 0;
  for (const auto& t : r)
    if (t.condition == cond && t.solved_at && *t.solved_at <= budget) ++n;
  return n;
}

std::string failures_of(const harness::ExperimentResults& r) {
  if (r.failures.empty()) return "";
  return ", " + std::to_string(r.failures.size()) + " failed trials (first: " + r.failures[0].stage + ": " +
         r.failures[0].message + ")";
}

Outcome cliffwalking_benefit() {
  auto cfg = harness::ExperimentConfig::defaults("CliffWalking-m");
  cfg.trials = 10;
  cfg.episodes = 200;
  cfg.conditions = {harness::Condition::immediate, harness::Condition::delayed, harness::Condition::shaped_random};
  const auto r = harness::run_experiment(cfg, work_dir("cliffwalking"));
  const std::size_t imm = solved_within(r.trials, "immediate", 200), del = solved_within(r.trials, "delayed", 200),
                    shp = solved_within(r.trials, "shaped_random", 200);
  std::ostringstream s;
  s << "solved within 200: immediate " << imm << "/10, shaped_random " << shp << "/10, delayed " << del << "/10"
    << failures_of(r);
  return {r.failures.empty() && shp > del && imm >= 9, s.str()};
}

Outcome cartpole_benefit() {
  auto cfg = harness::ExperimentConfig::defaults("CartPole-v1");
  cfg.trials = 10;
  cfg.episodes = 500;
  cfg.cutoffs = {10, 25, 50, 100, 200, 500};
  cfg.conditions = {harness::Condition::delayed, harness::Condition::shaped_expert};
  const auto r = harness::run_experiment(cfg, work_dir("cartpole"));
  double shaped = 0, delayed = 0;
  if (!r.trials.empty()) {
    for (const auto& c : harness::evaluate_solve_curves(r.trials, cfg.cutoffs)) {
      if (c.condition == "shaped_expert") shaped = c.fraction.back();
      if (c.condition == "delayed") delayed = c.fraction.back();
    }
  }
  const std::size_t delayed_solves = solved_within(r.trials, "delayed", 500);
  std::ostringstream s;
  s << "solved fraction at 500: shaped_expert " << shaped << ", delayed " << delayed << failures_of(r);
  return {r.failures.empty() && shaped > delayed && delayed_solves <= 2, s.str()};
}

Outcome cliffwalking_oracle() {
  const envs::CliffOracle o = envs::solve_cliffwalking_m();
  std::vector<std::string> logged;
  const double threshold = harness::solve_threshold("CliffWalking-m", [&](const std::string& m) { logged.push_back(m); });
  const bool warned = std::any_of(logged.begin(), logged.end(),
                                  [](const std::string& m) { return m.find("88") != std::string::npos; });
  std::ostringstream s;
  s << "converged " << (o.converged ? "yes" : "no") << " in " << o.iterations << " sweeps, optimum "
    << o.optimal_return << ", threshold " << threshold << ", warning " << (warned ? "logged" : "missing");
  return {o.converged && o.reaches_goal && threshold == o.optimal_return && (o.optimal_return == 88.0 || warned),
          s.str()};
}

Outcome determinism() {
  std::vector<std::string> diffs;
  auto compare_runs = [&](harness::ExperimentConfig cfg, const std::string& tag) {
    const fs::path a = work_dir(tag + "_a"), b = work_dir(tag + "_b");
    harness::run_experiment(cfg, a);
    harness::run_experiment(cfg, b);
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      if (slurp(e.path()) != slurp(b / fs::relative(e.path(), a))) diffs.push_back(fs::relative(e.path(), a).string());
    }
    return files;
  };
  auto cw = harness::ExperimentConfig::defaults("CliffWalking-m");
  cw.trials = 3;
  cw.seed = 77;
  cw.ares.epochs_random = 20;
  cw.ares.epochs_expert = 20;
  auto cp = harness::ExperimentConfig::defaults("CartPole-v1");
  cp.trials = 2;
  cp.seed = 78;
  cp.episodes = 15;
  cp.random_episodes = 20;
  cp.expert_dataset = "";
  cp.conditions = {harness::Condition::immediate, harness::Condition::delayed, harness::Condition::shaped_random};
  cp.ares.epochs_random = 5;
  const std::size_t files = compare_runs(cw, "det_cliff") + compare_runs(cp, "det_cart");
  return {diffs.empty() && files > 0, std::to_string(files - diffs.size()) + "/" + std::to_string(files) +
                                          " CSV files byte-identical across reruns"};
}

Outcome merge_soundness() {
  using namespace reward_map;
  Rng rng(99);
  std::size_t bad = 0, events = 0;
  for (int m = 0; m < 1000; ++m) {
    const std::size_t n = 1 + rng.index(80);
    std::vector<Vec> keys;
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
      keys.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2), static_cast<double>(rng.index(3))});
      values.push_back(rng.uniform(-10, 10));
    }
    const ShapedRewardMap map(2, 1, DistanceConfig{}, keys, values);
    MergeConfig mc;
    mc.epsilon = rng.uniform(0.05, 1.5);
    mc.p_state = rng.bernoulli(0.5) ? 1 : 2;
    mc.p_action = rng.bernoulli(0.5) ? 1 : 2;
    const MergeResult r = merge_rewards(map, mc);
    if (r.map.size() > map.size()) ++bad;
    // Replay the recorded merges against the source values.
    std::vector<double> current = values;
    std::vector<bool> live(n, true);
    for (const MergeEvent& e : r.events) {
      ++events;
      const bool sources = live[e.survivor] && live[e.absorbed] && e.left_value == current[e.survivor] &&
                           e.right_value == current[e.absorbed];
      if (!sources || std::abs(e.merged_value - 0.5 * (e.left_value + e.right_value)) > 1e-12) ++bad;
      current[e.survivor] = e.merged_value;
      live[e.absorbed] = false;
    }
    std::vector<double> expect;
    for (std::size_t i = 0; i < n; ++i)
      if (live[i]) expect.push_back(current[i]);
    if (expect != r.map.values()) ++bad;
  }
  return {bad == 0, "1000 maps, " + std::to_string(events) + " merges, " + std::to_string(bad) + " violations"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient fidelity", gradient_fidelity},
      {"extraction identity", extraction_identity},
      {"extraction reference", extraction_reference},
      {"nearest-neighbor oracle", nearest_neighbor_oracle},
      {"reward conservation", reward_conservation},
      {"training progress", training_progress},
      {"CliffWalking-m shaping benefit", cliffwalking_benefit},
      {"CartPole shaping benefit", cartpole_benefit},
      {"CliffWalking-m oracle", cliffwalking_oracle},
      {"determinism", determinism},
      {"merge soundness", merge_soundness},
  };
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu %s: %s (%s; %.1fs)\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
