#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ares::data {

using Vec = std::vector<double>;

// One trajectory: per-step state and action vectors, an optional per-step
// reward trace, and the episodic return g.
struct Episode {
  std::vector<Vec> states;
  std::vector<Vec> actions;
  std::optional<std::vector<double>> rewards;
  double episode_return = 0.0;
  std::map<std::string, std::string> meta;

  std::size_t length() const { return states.size(); }

  // Throws ContractError when lengths disagree or the reward trace does not
  // sum (left to right) to episode_return exactly.
  void validate() const;

  friend bool operator==(const Episode&, const Episode&) = default;
};

// Left-to-right sum; the exact accumulation order used everywhere a reward
// trace is compared to a return.
double sum_rewards(const std::vector<double>& rewards);

struct DatasetInfo {
  std::string env;
  std::string policy;
  std::uint64_t seed = 0;
  std::size_t state_dim = 0;
  std::size_t act_dim = 0;
  std::map<std::string, std::string> params;

  friend bool operator==(const DatasetInfo&, const DatasetInfo&) = default;
};

struct Dataset {
  DatasetInfo info;
  std::vector<Episode> episodes;

  std::size_t total_steps() const;
  // Validates every episode and its dimensions against info.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

}  // namespace ares::data

namespace ares::data {

// One extracted shaped reward keyed by its raw state-action pair.
struct ShapedSample {
  Vec state;
  Vec action;
  double reward = 0.0;

  friend bool operator==(const ShapedSample&, const ShapedSample&) = default;
};

}  // namespace ares::data
