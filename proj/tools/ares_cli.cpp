#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ares/core/error.hpp"
#include "ares/core/format.hpp"
#include "ares/data/generate.hpp"
#include "ares/data/jsonl.hpp"
#include "ares/data/stats.hpp"
#include "ares/envs/wrappers.hpp"
#include "ares/harness/experiment.hpp"
#include "ares/harness/results.hpp"
#include "ares/model/checkpoint.hpp"
#include "ares/model/trainer.hpp"
#include "ares/reward_map/reward_map.hpp"

using namespace ares;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::string env;
  std::string preset;
  std::string condition;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> epochs;
  std::vector<std::string> set;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key = value settings file")->check(CLI::ExistingFile);
  app->add_option("--env", c.env, "CliffWalking-m or CartPole-v1");
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--trials", c.trials, "trials per condition");
  app->add_option("--out-dir", c.out_dir, "output directory");
  app->add_option("--condition", c.condition, "comma-separated conditions to run");
  app->add_option("--epochs", c.epochs, "ARES training epochs");
  app->add_option("--preset", c.preset, "distance preset: 5110 or 5220");
  app->add_option("--set", c.set, "extra key=value setting (repeatable)");
}

harness::ExperimentConfig resolve(const Common& c) {
  harness::Settings file;
  if (!c.config.empty()) file = harness::read_settings_file(c.config);
  harness::Settings flags;
  if (!c.env.empty()) flags.emplace_back("env", c.env);
  if (c.seed) flags.emplace_back("seed", std::to_string(*c.seed));
  if (c.trials) flags.emplace_back("trials", std::to_string(*c.trials));
  if (!c.condition.empty()) flags.emplace_back("conditions", c.condition);
  if (c.epochs) flags.emplace_back("ares.epochs", std::to_string(*c.epochs));
  if (!c.preset.empty()) flags.emplace_back("map.preset", c.preset);
  for (const auto& kv : c.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    flags.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return harness::resolve_config(file, flags);
}

fs::path out_dir(const Common& c) { return c.out_dir.empty() ? fs::path("ares_out") : fs::path(c.out_dir); }

void log_line(const std::string& msg) { std::cerr << msg << '\n'; }

model::AresConfig model_config(const harness::ExperimentConfig& cfg, const data::Dataset& d, bool expert) {
  auto env = envs::make_env(d.info.env);
  const auto& spec = env->spec();
  model::AresConfig m;
  m.token_dim = d.info.state_dim + d.info.act_dim;
  m.h_dim = cfg.ares.h_dim;
  m.dropout_p = cfg.ares.dropout;
  m.ff_ratio = cfg.ares.ff_ratio;
  m.max_T = cfg.ares.max_T;
  m.positional_encoding = cfg.ares.positional_encoding;
  if (cfg.ares.discrete_embedding) m.discrete_vocab = {spec.n_states, spec.n_actions};
  m.optimizer.lr = cfg.ares.lr;
  m.optimizer.weight_decay = cfg.ares.weight_decay;
  m.epochs = expert ? cfg.ares.epochs_expert : cfg.ares.epochs_random;
  m.seed = cfg.seed;
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ARES reward shaping toolkit"};
  app.require_subcommand(1);

  Common gen_c;
  std::string gen_kind = "random";
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-data", "generate a random or trainingexpert dataset");
  add_common(gen, gen_c);
  gen->add_option("--kind", gen_kind, "random or trainingexpert")->check(CLI::IsMember({"random", "trainingexpert"}));
  gen->add_option("--out", gen_out, "dataset file (default <out-dir>/<kind>.jsonl)");

  Common tr_c;
  std::string tr_data;
  std::string tr_out;
  auto* tr = app.add_subcommand("train-ares", "train the return model on a dataset");
  add_common(tr, tr_c);
  tr->add_option("--data", tr_data, "dataset file")->required()->check(CLI::ExistingFile);
  tr->add_option("--out", tr_out, "checkpoint file (default <out-dir>/model.ckpt)");

  Common ex_c;
  std::string ex_model;
  std::string ex_data;
  std::string ex_out;
  auto* ex = app.add_subcommand("extract-rewards", "extract shaped rewards into a reward map");
  add_common(ex, ex_c);
  ex->add_option("--model", ex_model, "checkpoint file")->required()->check(CLI::ExistingFile);
  ex->add_option("--data", ex_data, "dataset file")->required()->check(CLI::ExistingFile);
  ex->add_option("--out", ex_out, "reward map file (default <out-dir>/rewards.map)");

  Common mg_c;
  std::string mg_map;
  std::string mg_out;
  double mg_eps = 0.1;
  auto* mg = app.add_subcommand("merge-rewards", "proximity-merge a reward map");
  add_common(mg, mg_c);
  mg->add_option("--map", mg_map, "reward map file")->required()->check(CLI::ExistingFile);
  mg->add_option("--epsilon", mg_eps, "merge distance");
  mg->add_option("--out", mg_out, "merged map file (default <out-dir>/merged.map)");

  Common ag_c;
  std::string ag_map;
  std::string ag_out;
  auto* ag = app.add_subcommand("train-agent", "train one agent under one reward condition");
  add_common(ag, ag_c);
  ag->add_option("--map", ag_map, "reward map for shaped conditions")->check(CLI::ExistingFile);
  ag->add_option("--out", ag_out, "CSV file (default <out-dir>/agent.csv)");

  Common ev_c;
  std::string ev_results;
  std::string ev_out;
  auto* ev = app.add_subcommand("evaluate", "solve-rate curves from a results CSV");
  add_common(ev, ev_c);
  ev->add_option("--results", ev_results, "results CSV")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", ev_out, "plot data file (default <out-dir>/curves.tsv)");

  Common rx_c;
  auto* rx = app.add_subcommand("run-experiment", "full pipeline over all trials and conditions");
  add_common(rx, rx_c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const auto cfg = resolve(gen_c);
      auto env = envs::make_env(cfg.env);
      data::Dataset d;
      if (gen_kind == "random") {
        data::RandomDatasetOptions opt;
        opt.n_episodes = cfg.random_episodes;
        opt.seed = cfg.seed;
        opt.reject_at_or_below = data::default_random_filter(cfg.env);
        d = data::generate_random_dataset(*env, opt);
      } else {
        data::ExpertDatasetOptions opt;
        opt.agent = cfg.agent;
        opt.optimal_return = harness::solve_threshold(cfg.env, log_line);
        opt.episode_cap = cfg.expert_cap;
        opt.seed = cfg.seed;
        opt.retry_limit = cfg.expert_retries;
        d = data::generate_trainingexpert_dataset(*env, opt);
      }
      const fs::path path = gen_out.empty() ? out_dir(gen_c) / (gen_kind + ".jsonl") : fs::path(gen_out);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      data::serialize(d, path);
      std::cout << data::describe(data::dataset_stats(d)) << "wrote " << path.string() << '\n';
    } else if (tr->parsed()) {
      const auto cfg = resolve(tr_c);
      const data::Dataset d = data::deserialize(tr_data);
      model::AresModel m(model_config(cfg, d, d.info.policy == "trainingexpert"));
      const auto report = model::train(m, d, [&](std::size_t e, double loss) {
        if (e == 0 || (e + 1) % 100 == 0 || e + 1 == m.config().epochs) {
          std::cerr << "epoch " << e + 1 << " mean mse " << format_double(loss) << '\n';
        }
      });
      const fs::path path = tr_out.empty() ? out_dir(tr_c) / "model.ckpt" : fs::path(tr_out);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      model::save_checkpoint(m, path);
      std::cout << "first epoch " << format_double(report.epoch_mean_loss.front()) << ", final epoch "
                << format_double(report.epoch_mean_loss.back()) << "\nwrote " << path.string() << '\n';
    } else if (ex->parsed()) {
      const auto cfg = resolve(ex_c);
      model::AresModel m = model::load_checkpoint(ex_model);
      const data::Dataset d = data::deserialize(ex_data);
      auto map = reward_map::build_map(model::extract_all(m, d), cfg.map.distance);
      if (cfg.map.normalize) map = reward_map::normalize(map);
      const fs::path path = ex_out.empty() ? out_dir(ex_c) / "rewards.map" : fs::path(ex_out);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      reward_map::save_map(map, path);
      std::cout << map.size() << " entries\nwrote " << path.string() << '\n';
    } else if (mg->parsed()) {
      const auto cfg = resolve(mg_c);
      const auto map = reward_map::load_map(mg_map);
      reward_map::MergeConfig mc;
      mc.epsilon = mg_eps;
      mc.p_state = cfg.map.distance.p_state;
      mc.p_action = cfg.map.distance.p_action;
      const auto merged = reward_map::merge_rewards(map, mc);
      const fs::path path = mg_out.empty() ? out_dir(mg_c) / "merged.map" : fs::path(mg_out);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      reward_map::save_map(merged.map, path);
      std::cout << map.size() << " -> " << merged.map.size() << " entries (" << merged.events.size()
                << " merges)\nwrote " << path.string() << '\n';
    } else if (ag->parsed()) {
      const auto cfg = resolve(ag_c);
      if (cfg.conditions.size() != 1) throw ConfigError("train-agent needs exactly one --condition");
      const harness::Condition cond = cfg.conditions.front();
      const double threshold = harness::solve_threshold(cfg.env, log_line);
      std::unique_ptr<envs::RewardWrapper> env;
      if (cond == harness::Condition::immediate) {
        env = std::make_unique<envs::ImmediateReward>(envs::make_env(cfg.env));
      } else if (cond == harness::Condition::delayed) {
        env = std::make_unique<envs::DelayedReward>(envs::make_env(cfg.env));
      } else {
        if (ag_map.empty()) throw ConfigError("shaped conditions need --map");
        env = std::make_unique<envs::ShapedReward>(
            envs::make_env(cfg.env), std::make_shared<const reward_map::ShapedRewardMap>(reward_map::load_map(ag_map)));
      }
      agents::TrainOptions opt;
      opt.max_episodes = cfg.episodes;
      opt.success = {threshold, cfg.success_repeat};
      opt.stop_on_solve = cfg.stop_on_solve;
      auto result = agents::train_agent(*env, cfg.agent, opt, harness::trial_seed(cfg.seed, 0));
      result.condition = harness::condition_name(cond);
      const fs::path path = ag_out.empty() ? out_dir(ag_c) / "agent.csv" : fs::path(ag_out);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      harness::emit_csv({cfg.run_id, cfg.env, {result}}, path);
      std::cout << result.condition << ": "
                << (result.solved_at ? "solved at episode " + std::to_string(*result.solved_at) : "not solved")
                << "\nwrote " << path.string() << '\n';
    } else if (ev->parsed()) {
      const auto cfg = resolve(ev_c);
      const auto run = harness::parse_csv(ev_results);
      const auto curves = harness::evaluate_solve_curves(run.trials, cfg.cutoffs);
      const fs::path path = ev_out.empty() ? out_dir(ev_c) / "curves.tsv" : fs::path(ev_out);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      harness::emit_plot_data(curves, path);
      harness::write_plot_data(curves, std::cout);
    } else if (rx->parsed()) {
      const auto cfg = resolve(rx_c);
      const auto results = harness::run_experiment(cfg, out_dir(rx_c), log_line);
      if (!results.trials.empty()) {
        harness::write_plot_data(harness::evaluate_solve_curves(results.trials, cfg.cutoffs), std::cout);
      }
      return results.failures.empty() ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
