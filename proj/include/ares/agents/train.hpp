#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ares/agents/dqn.hpp"
#include "ares/agents/q_learning.hpp"
#include "ares/envs/wrappers.hpp"

namespace ares::agents {

enum class Algorithm { tabular_q, dqn };

Algorithm algorithm_from_name(const std::string& name);
std::string algorithm_name(Algorithm a);

struct AgentSettings {
  Algorithm algorithm = Algorithm::tabular_q;
  QConfig q;
  DqnConfig dqn;
};

// An episode counts as a success when its evaluation return reaches
// threshold; the trial is solved at the repeat-th success.
struct SuccessRule {
  double threshold = 0.0;
  std::size_t repeat = 1;
};

struct EpisodeTrace {
  std::vector<std::vector<double>> states;
  std::vector<int> actions;
  std::vector<double> eval_rewards;
  double eval_return = 0.0;
};

struct TrialResult {
  std::string condition;
  std::size_t trial = 0;
  std::vector<double> eval_returns;    // original-reward return of episode 1, 2, ...
  std::optional<std::size_t> solved_at;  // 1-based episode number
  std::optional<std::string> failure;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct TrainOptions {
  std::size_t max_episodes = 200;
  SuccessRule success;
  bool stop_on_solve = false;
  // Called after every episode with the executed trajectory; returning true
  // ends training.
  std::function<bool(const EpisodeTrace&)> on_episode;
};

// Trains a fresh learner against env. The learner only sees env through the
// AgentEnv interface; evaluation returns are read from the wrapper's
// evaluation channel after each episode.
TrialResult train_agent(envs::RewardWrapper& env, const AgentSettings& settings, const TrainOptions& options,
                        std::uint64_t seed);

}  // namespace ares::agents
