#include "ares/harness/experiment.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "ares/core/error.hpp"
#include "ares/core/format.hpp"
#include "ares/core/rng.hpp"
#include "ares/data/generate.hpp"
#include "ares/data/jsonl.hpp"
#include "ares/envs/cartpole.hpp"
#include "ares/envs/cliffwalking.hpp"
#include "ares/envs/wrappers.hpp"
#include "ares/harness/results.hpp"
#include "ares/model/checkpoint.hpp"
#include "ares/model/trainer.hpp"
#include "ares/reward_map/reward_map.hpp"

namespace ares::harness {
namespace fs = std::filesystem;

model::AresConfig ares_config(const ExperimentConfig& c, const envs::EnvSpec& spec, std::size_t epochs,
                              std::uint64_t seed) {
  model::AresConfig m;
  m.token_dim = spec.state_dim + spec.act_dim;
  m.h_dim = c.ares.h_dim;
  m.dropout_p = c.ares.dropout;
  m.ff_ratio = c.ares.ff_ratio;
  m.max_T = c.ares.max_T;
  m.positional_encoding = c.ares.positional_encoding;
  if (c.ares.discrete_embedding) {
    if (!spec.discrete_state) throw ConfigError("ares.discrete_embedding needs a discrete state space");
    m.discrete_vocab = {spec.n_states, spec.n_actions};
  }
  m.optimizer.lr = c.ares.lr;
  m.optimizer.weight_decay = c.ares.weight_decay;
  m.epochs = epochs;
  m.seed = seed;
  return m;
}

namespace {

enum class Source { random, expert };

const char* source_name(Source s) { return s == Source::random ? "random" : "expert"; }

struct TrialOutcome {
  std::vector<agents::TrialResult> results;
  std::optional<TrialFailure> failure;
};

class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what) : Error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

template <typename F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

class TrialRunner {
 public:
  TrialRunner(const ExperimentConfig& config, double threshold, const fs::path& out_dir, const Logger& log)
      : config_(config), threshold_(threshold), out_dir_(out_dir), log_(log) {}

  TrialOutcome run(std::size_t trial) {
    TrialOutcome outcome;
    const std::uint64_t seed = trial_seed(config_.seed, trial);
    std::ostringstream name;
    name << "trial_" << std::setw(2) << std::setfill('0') << trial;
    const fs::path dir = out_dir_ / name.str();
    try {
      fs::create_directories(dir);
      std::shared_ptr<const reward_map::ShapedRewardMap> random_map;
      std::shared_ptr<const reward_map::ShapedRewardMap> expert_map;
      if (config_.has(Condition::shaped_random)) random_map = shaped_map(Source::random, dir, seed);
      if (config_.has(Condition::shaped_expert)) expert_map = shaped_map(Source::expert, dir, seed);
      for (Condition c : config_.conditions) {
        outcome.results.push_back(stage("agent:" + condition_name(c), [&] {
          auto env = make_wrapper(c, c == Condition::shaped_random ? random_map : expert_map);
          agents::TrainOptions opt;
          opt.max_episodes = config_.episodes;
          opt.success = {threshold_, config_.success_repeat};
          opt.stop_on_solve = config_.stop_on_solve;
          agents::TrialResult r = agents::train_agent(*env, config_.agent, opt, Rng::derive(seed, 100));
          r.condition = condition_name(c);
          r.trial = trial;
          return r;
        }));
      }
      emit_csv(CsvRun{config_.run_id, config_.env, outcome.results}, dir / "results.csv");
    } catch (const StageError& e) {
      outcome.failure = TrialFailure{trial, e.stage(), e.what()};
    } catch (const std::exception& e) {
      outcome.failure = TrialFailure{trial, "setup", e.what()};
    }
    return outcome;
  }

 private:
  std::unique_ptr<envs::RewardWrapper> make_wrapper(Condition c,
                                                    const std::shared_ptr<const reward_map::ShapedRewardMap>& map) {
    auto env = envs::make_env(config_.env);
    switch (c) {
      case Condition::immediate: return std::make_unique<envs::ImmediateReward>(std::move(env));
      case Condition::delayed: return std::make_unique<envs::DelayedReward>(std::move(env));
      default: return std::make_unique<envs::ShapedReward>(std::move(env), map);
    }
  }

  data::Dataset dataset(Source s, const fs::path& dir, std::uint64_t seed) {
    const std::string& given = s == Source::random ? config_.random_dataset : config_.expert_dataset;
    if (!given.empty()) return data::deserialize(given);
    const fs::path path = dir / (std::string(source_name(s)) + ".jsonl");
    if (config_.resume && fs::exists(path)) return data::deserialize(path);
    auto env = envs::make_env(config_.env);
    data::Dataset d;
    if (s == Source::random) {
      data::RandomDatasetOptions opt;
      opt.n_episodes = config_.random_episodes;
      opt.seed = Rng::derive(seed, 1);
      opt.reject_at_or_below = data::default_random_filter(config_.env);
      d = data::generate_random_dataset(*env, opt);
    } else {
      data::ExpertDatasetOptions opt;
      opt.agent = config_.agent;
      opt.optimal_return = threshold_;
      opt.episode_cap = config_.expert_cap;
      opt.seed = Rng::derive(seed, 3);
      opt.retry_limit = config_.expert_retries;
      d = data::generate_trainingexpert_dataset(*env, opt);
    }
    data::serialize(d, path);
    return d;
  }

  std::shared_ptr<const reward_map::ShapedRewardMap> shaped_map(Source s, const fs::path& dir, std::uint64_t seed) {
    const std::string tag = source_name(s);
    const fs::path map_path = dir / (tag + ".map");
    if (config_.resume && fs::exists(map_path)) {
      return stage("map:" + tag, [&] { return std::make_shared<const reward_map::ShapedRewardMap>(reward_map::load_map(map_path)); });
    }
    const data::Dataset d = stage("dataset:" + tag, [&] { return dataset(s, dir, seed); });
    model::AresModel m = stage("ares:" + tag, [&] { return model(s, d, dir, seed); });
    return stage("map:" + tag, [&] {
      auto samples = model::extract_all(m, d);
      auto map = reward_map::build_map(samples, config_.map.distance);
      if (config_.map.normalize) map = reward_map::normalize(map);
      if (config_.map.merge_epsilon > 0.0) {
        reward_map::MergeConfig mc;
        mc.epsilon = config_.map.merge_epsilon;
        mc.p_state = config_.map.distance.p_state;
        mc.p_action = config_.map.distance.p_action;
        map = reward_map::merge_rewards(map, mc).map;
      }
      reward_map::save_map(map, map_path);
      return std::make_shared<const reward_map::ShapedRewardMap>(std::move(map));
    });
  }

  model::AresModel model(Source s, const data::Dataset& d, const fs::path& dir, std::uint64_t seed) {
    const std::string tag = source_name(s);
    const fs::path path = dir / (tag + ".ckpt");
    if (config_.resume && fs::exists(path)) return model::load_checkpoint(path);
    const auto spec = envs::make_env(config_.env)->spec();
    const std::size_t epochs = s == Source::random ? config_.ares.epochs_random : config_.ares.epochs_expert;
    model::AresModel m(ares_config(config_, spec, epochs, Rng::derive(seed, s == Source::random ? 2 : 4)));
    const auto report = model::train(m, d);
    std::ofstream loss(dir / (tag + "_loss.tsv"), std::ios::binary);
    loss << "epoch\tmean_mse\n";
    for (std::size_t e = 0; e < report.epoch_mean_loss.size(); ++e) {
      loss << e + 1 << '\t' << format_double(report.epoch_mean_loss[e]) << '\n';
    }
    model::save_checkpoint(m, path);
    return m;
  }

  const ExperimentConfig& config_;
  double threshold_;
  fs::path out_dir_;
  const Logger& log_;
};

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) { return Rng::derive(master, 1 + trial); }

double solve_threshold(const std::string& env, const Logger& log) {
  if (env == "CliffWalking-m") {
    const envs::CliffOracle oracle = envs::solve_cliffwalking_m();
    if (!oracle.converged || !oracle.reaches_goal) throw StateError("CliffWalking-m value iteration did not converge");
    if (auto warning = envs::cliff_threshold_warning(oracle.optimal_return); warning && log) log("warning: " + *warning);
    return oracle.optimal_return;
  }
  if (env == "CartPole-v1") return static_cast<double>(envs::cartpole::kMaxSteps);
  throw ConfigError("no solve threshold for environment '" + env + "'");
}

ExperimentResults run_experiment(const ExperimentConfig& config, const fs::path& out_dir, const Logger& log) {
  config.validate();
  fs::create_directories(out_dir);
  ExperimentResults results;
  results.config = config;
  std::mutex log_mutex;
  Logger safe_log = [&](const std::string& msg) {
    std::lock_guard<std::mutex> lock(log_mutex);
    if (msg.rfind("warning: ", 0) == 0) results.warnings.push_back(msg.substr(9));
    if (log) log(msg);
  };
  results.solve_threshold = solve_threshold(config.env, safe_log);
  {
    std::ofstream cfg(out_dir / "config.txt", std::ios::binary);
    write_config(config, cfg);
    cfg << "# solve_threshold = " << format_double(results.solve_threshold) << '\n';
  }

  std::vector<TrialOutcome> outcomes(config.trials);
  std::atomic<std::size_t> next{0};
  TrialRunner runner(config, results.solve_threshold, out_dir, safe_log);
  auto worker = [&] {
    for (std::size_t k = next++; k < config.trials; k = next++) {
      outcomes[k] = runner.run(k);
      std::ostringstream msg;
      msg << "trial " << k << (outcomes[k].failure ? " failed" : " done");
      for (const auto& r : outcomes[k].results) {
        msg << "  " << r.condition << '=' << (r.solved_at ? std::to_string(*r.solved_at) : "-");
      }
      safe_log(msg.str());
    }
  };
  const std::size_t n_threads = std::min(config.threads, config.trials);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto& o : outcomes) {
    if (o.failure) {
      safe_log("warning: trial " + std::to_string(o.failure->trial) + " failed at " + o.failure->stage + ": " +
               o.failure->message);
      results.failures.push_back(*o.failure);
    } else {
      for (auto& r : o.results) results.trials.push_back(std::move(r));
    }
  }
  emit_csv(CsvRun{config.run_id, config.env, results.trials}, out_dir / "results.csv");
  if (!results.trials.empty()) emit_plot_data(evaluate_solve_curves(results.trials, config.cutoffs), out_dir / "curves.tsv");
  std::ofstream failures(out_dir / "failures.txt", std::ios::binary);
  for (const auto& f : results.failures) failures << f.trial << '\t' << f.stage << '\t' << f.message << '\n';
  std::ofstream warnings(out_dir / "warnings.txt", std::ios::binary);
  for (const auto& w : results.warnings) warnings << w << '\n';
  return results;
}

}  // namespace ares::harness
