#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ares/core/error.hpp"
#include "ares/harness/experiment.hpp"
#include "ares/harness/results.hpp"

using namespace ares;
using namespace ares::harness;
namespace fs = std::filesystem;

namespace {

agents::TrialResult trial(const std::string& cond, std::size_t k, std::vector<double> returns,
                          std::optional<std::size_t> solved) {
  agents::TrialResult r;
  r.condition = cond;
  r.trial = k;
  r.eval_returns = std::move(returns);
  r.solved_at = solved;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ares_unit_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig quick(std::vector<Condition> conditions) {
  ExperimentConfig c = ExperimentConfig::defaults("CliffWalking-m");
  c.trials = 1;
  c.conditions = std::move(conditions);
  c.episodes = 5;
  c.cutoffs = {2, 5};
  c.random_episodes = 3;
  c.expert_cap = 200;
  c.ares.h_dim = 4;
  c.ares.epochs_random = 2;
  c.ares.epochs_expert = 2;
  c.seed = 21;
  return c;
}

std::size_t count_ext(const fs::path& dir, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.path().extension() == ext) ++n;
  return n;
}

}  // namespace

TEST_CASE("solve curves") {
  const std::vector<std::size_t> cutoffs{25, 100};
  const auto curves = evaluate_solve_curves(
      {trial("shaped_random", 0, {}, 10), trial("shaped_random", 1, {}, 50), trial("shaped_random", 2, {}, std::nullopt)},
      cutoffs);
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].fraction[0] == doctest::Approx(1.0 / 3.0));
  CHECK(curves[0].fraction[1] == doctest::Approx(2.0 / 3.0));
  CHECK(curves[0].stddev[0] == doctest::Approx(std::sqrt(2.0) / 3.0));

  const auto all = evaluate_solve_curves({trial("immediate", 0, {}, 1), trial("immediate", 1, {}, 1)}, cutoffs);
  CHECK(all[0].fraction == std::vector<double>{1.0, 1.0});
  CHECK(all[0].stddev == std::vector<double>{0.0, 0.0});
  const auto none = evaluate_solve_curves({trial("delayed", 0, {}, std::nullopt)}, cutoffs);
  CHECK(none[0].fraction == std::vector<double>{0.0, 0.0});

  const auto two = evaluate_solve_curves({trial("a", 0, {}, 3), trial("b", 0, {}, 90), trial("a", 1, {}, 60)}, {1, 5, 50, 100});
  REQUIRE(two.size() == 2);
  CHECK(two[0].condition == "a");
  for (const auto& c : two)
    for (std::size_t i = 0; i + 1 < c.fraction.size(); ++i) CHECK(c.fraction[i] <= c.fraction[i + 1]);
  CHECK_THROWS_AS(evaluate_solve_curves({}, cutoffs), ContractError);
}

TEST_CASE("csv") {
  CsvRun run{"r1", "CliffWalking-m",
             {trial("immediate", 0, {-13.0, 87.0, 0.1 + 0.2}, 2), trial("delayed", 0, {-200.5, -17.0, -1e-300}, std::nullopt)}};
  std::ostringstream out;
  write_csv(run, out);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
  CHECK(text.substr(0, text.find('\n')) == "run_id,env,condition,trial,episode,eval_return,solved_at");
  std::istringstream in(text);
  const CsvRun back = read_csv(in);
  CHECK(back.run_id == "r1");
  CHECK(back.env == "CliffWalking-m");
  CHECK(back.trials == run.trials);

  std::ostringstream empty;
  write_csv(CsvRun{"r", "e", {}}, empty);
  const std::string header_only = empty.str();
  CHECK(std::count(header_only.begin(), header_only.end(), '\n') == 1);
  CHECK_THROWS_AS(emit_csv(run, "/nonexistent_dir/x/results.csv"), IoError);
}

TEST_CASE("plot data") {
  SolveCurve c{"immediate", {100}, {0.75}, {0.5}};
  std::ostringstream out;
  write_plot_data({c}, out);
  std::istringstream in(out.str());
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  CHECK_FALSE(std::getline(in, extra));
  CHECK(row == "immediate\t100\t0.75\t0.25\t1");
  SolveCurve low{"delayed", {10, 20}, {0.125, 0.0}, {0.25, 0.0}};
  std::ostringstream o2;
  write_plot_data({low}, o2);
  CHECK(o2.str().find("\t0\t0.375") != std::string::npos);
}

TEST_CASE("config") {
  const ExperimentConfig cw = ExperimentConfig::defaults("CliffWalking-m");
  CHECK(cw.agent.algorithm == agents::Algorithm::tabular_q);
  CHECK(cw.trials == 10);
  CHECK(cw.random_episodes == 100);
  const ExperimentConfig cp = ExperimentConfig::defaults("CartPole-v1");
  CHECK(cp.agent.algorithm == agents::Algorithm::dqn);
  CHECK(cp.random_episodes == 200);
  CHECK(cp.expert_cap == 500);

  SUBCASE("settings round trip") {
    ExperimentConfig c = cw;
    apply_setting(c, "trials", "3");
    apply_setting(c, "ares.lr", "0.0025");
    apply_setting(c, "map.preset", "5220");
    apply_setting(c, "conditions", "immediate,shaped_expert");
    ExperimentConfig back = ExperimentConfig::defaults("CliffWalking-m");
    for (const auto& [k, v] : settings_of(c)) apply_setting(back, k, v);
    CHECK(settings_of(back) == settings_of(c));
    CHECK(back.trials == 3);
    CHECK(back.map.distance.p_state == 2);
  }
  SUBCASE("file then overrides") {
    std::istringstream file("# comment\nenv = CartPole-v1\ntrials = 4  # inline\nepisodes = 50\n");
    const ExperimentConfig c = resolve_config(read_settings(file), {{"trials", "2"}});
    CHECK(c.env == "CartPole-v1");
    CHECK(c.agent.algorithm == agents::Algorithm::dqn);
    CHECK(c.trials == 2);
    CHECK(c.episodes == 50);
  }
  SUBCASE("validation") {
    ExperimentConfig c = cw;
    CHECK_THROWS_AS(apply_setting(c, "no.such.key", "1"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "trials", "many"), ConfigError);
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.trials = 1;
    c.cutoffs = {10, 10};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(condition_from_name("sparse"), ConfigError);
  }
  CHECK(trial_seed(5, 0) != trial_seed(5, 1));
  CHECK(trial_seed(5, 3) == trial_seed(5, 3));
  CHECK(solve_threshold("CliffWalking-m") == 87.0);
  CHECK(solve_threshold("CartPole-v1") == 500.0);
}

TEST_CASE("run_experiment counting and determinism") {
  SUBCASE("one trial, random source: 1 dataset, 1 model, 1 map") {
    const fs::path dir = scratch("count");
    const auto r = run_experiment(quick({Condition::immediate, Condition::delayed, Condition::shaped_random}), dir);
    CHECK(r.failures.empty());
    CHECK(r.trials.size() == 3);
    CHECK(count_ext(dir, ".jsonl") == 1);
    CHECK(count_ext(dir, ".ckpt") == 1);
    CHECK(count_ext(dir, ".map") == 1);
    CHECK(r.solve_threshold == 87.0);
    CHECK_FALSE(r.warnings.empty());
    fs::remove_all(dir);
  }
  SUBCASE("all four conditions and byte-identical reruns") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const auto ra = run_experiment(quick({kAllConditions[0], kAllConditions[1], kAllConditions[2], kAllConditions[3]}), a);
    run_experiment(quick({kAllConditions[0], kAllConditions[1], kAllConditions[2], kAllConditions[3]}), b);
    CHECK(ra.trials.size() == 4);
    CHECK(count_ext(a, ".map") == 2);
    CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
    CHECK(slurp(a / "curves.tsv") == slurp(b / "curves.tsv"));

    // Resume from persisted artifacts reproduces downstream results.
    ExperimentConfig resumed = quick({kAllConditions[0], kAllConditions[1], kAllConditions[2], kAllConditions[3]});
    resumed.resume = true;
    fs::remove(a / "results.csv");
    run_experiment(resumed, a);
    CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
  }
  SUBCASE("a failing stage is recorded and the run continues") {
    const fs::path dir = scratch("fail");
    ExperimentConfig c = quick({Condition::immediate, Condition::shaped_random});
    c.trials = 2;
    c.random_dataset = (dir / "missing.jsonl").string();
    const auto r = run_experiment(c, dir);
    CHECK(r.failures.size() == 2);
    CHECK(r.trials.empty());
    CHECK(fs::exists(dir / "failures.txt"));
    fs::remove_all(dir);
  }
}
