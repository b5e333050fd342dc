#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ares/agents/train.hpp"
#include "ares/envs/environment.hpp"
#include "ares/model/config.hpp"
#include "ares/reward_map/distance.hpp"

namespace ares::harness {

enum class Condition { immediate, delayed, shaped_random, shaped_expert };

inline constexpr Condition kAllConditions[] = {Condition::immediate, Condition::delayed, Condition::shaped_random,
                                              Condition::shaped_expert};

std::string condition_name(Condition c);
Condition condition_from_name(const std::string& name);

struct AresSettings {
  std::size_t h_dim = 32;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  double dropout = 0.01;
  std::size_t ff_ratio = 8;
  std::size_t max_T = 1050;
  std::size_t epochs_random = 5000;
  std::size_t epochs_expert = 10000;
  bool positional_encoding = false;
  bool discrete_embedding = false;
};

struct MapSettings {
  reward_map::DistanceConfig distance = reward_map::DistanceConfig::preset("5110");
  bool normalize = false;
  double merge_epsilon = 0.0;  // 0 disables proximity merging
};

struct ExperimentConfig {
  std::string run_id = "ares";
  std::string env = "CliffWalking-m";
  agents::AgentSettings agent;
  std::size_t trials = 10;
  std::vector<Condition> conditions{std::begin(kAllConditions), std::end(kAllConditions)};
  std::uint64_t seed = 0;
  std::size_t episodes = 200;
  std::vector<std::size_t> cutoffs{10, 25, 50, 100, 200, 500};
  bool stop_on_solve = true;
  std::size_t success_repeat = 1;
  std::size_t threads = 1;
  bool resume = false;

  std::size_t random_episodes = 100;
  std::string random_dataset;  // existing file; empty = generate
  std::string expert_dataset;
  std::size_t expert_cap = 200;
  std::size_t expert_retries = 10;

  AresSettings ares;
  MapSettings map;

  // Defaults for a built-in environment.
  static ExperimentConfig defaults(const std::string& env);

  // Throws ConfigError.
  void validate() const;
  bool has(Condition c) const;
};

// Applies one "key = value" setting; throws ConfigError for unknown keys or
// malformed values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

// Every setting as (key, value), in a fixed order; feeding these back through
// apply_setting reproduces the config.
std::vector<std::pair<std::string, std::string>> settings_of(const ExperimentConfig& config);

using Settings = std::vector<std::pair<std::string, std::string>>;

// Reads "key = value" lines ('#' starts a comment).
Settings read_settings(std::istream& in);
Settings read_settings_file(const std::filesystem::path& path);

// Defaults for the chosen env, then file settings, then overrides.
ExperimentConfig resolve_config(const Settings& file, const Settings& overrides);

void write_config(const ExperimentConfig& config, std::ostream& out);

struct TrialFailure {
  std::size_t trial = 0;
  std::string stage;
  std::string message;
};

struct ExperimentResults {
  ExperimentConfig config;
  double solve_threshold = 0.0;
  std::vector<agents::TrialResult> trials;  // (trial, condition) order
  std::vector<TrialFailure> failures;
  std::vector<std::string> warnings;
};

using Logger = std::function<void(const std::string&)>;

// Solve threshold of a built-in env: the value-iteration optimum for
// CliffWalking-m, 500 for CartPole-v1. Warnings go to log.
double solve_threshold(const std::string& env, const Logger& log = {});

// Return-model config the pipeline trains for one dataset of env.
model::AresConfig ares_config(const ExperimentConfig& config, const envs::EnvSpec& spec, std::size_t epochs,
                              std::uint64_t seed);

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

// Full pipeline per trial: datasets, ARES models, reward maps, then one
// agent per condition. All artifacts land under out_dir.
ExperimentResults run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                 const Logger& log = {});

}  // namespace ares::harness
