#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "ares/agents/train.hpp"
#include "ares/data/episode.hpp"
#include "ares/envs/environment.hpp"

namespace ares::data {

struct RandomDatasetOptions {
  std::size_t n_episodes = 100;
  std::uint64_t seed = 0;
  // Episodes whose return is <= this value are discarded and regenerated.
  std::optional<double> reject_at_or_below;
  std::size_t max_consecutive_rejections = 10000;
};

// Default filter per environment: CliffWalking-m drops returns <= -2000.
std::optional<double> default_random_filter(const std::string& env_name);

// Uniform-random policy on the raw environment.
Dataset generate_random_dataset(const envs::Environment& prototype, const RandomDatasetOptions& options);

struct ExpertDatasetOptions {
  agents::AgentSettings agent;
  double optimal_return = 0.0;
  std::size_t episode_cap = 200;
  std::uint64_t seed = 0;
  std::size_t retry_limit = 10;
};

// Logs every episode of an agent learning on immediate rewards, stopping
// right after its first optimal episode. A run that hits the cap is
// discarded and retried under a fresh derived seed.
Dataset generate_trainingexpert_dataset(const envs::Environment& prototype, const ExpertDatasetOptions& options);

}  // namespace ares::data
