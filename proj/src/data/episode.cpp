#include "ares/data/episode.hpp"

#include <string>

#include "ares/core/error.hpp"

namespace ares::data {

double sum_rewards(const std::vector<double>& rewards) {
  double total = 0.0;
  for (double r : rewards) total += r;
  return total;
}

void Episode::validate() const {
  if (states.size() != actions.size()) {
    throw ContractError("episode has " + std::to_string(states.size()) + " states but " +
                        std::to_string(actions.size()) + " actions");
  }
  if (rewards) {
    if (rewards->size() != states.size()) throw ContractError("episode reward trace length differs from step count");
    if (sum_rewards(*rewards) != episode_return) {
      throw ContractError("episode rewards sum to " + std::to_string(sum_rewards(*rewards)) + " but return is " +
                          std::to_string(episode_return));
    }
  }
}

std::size_t Dataset::total_steps() const {
  std::size_t n = 0;
  for (const auto& e : episodes) n += e.length();
  return n;
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const Episode& e = episodes[i];
    try {
      e.validate();
    } catch (const ContractError& err) {
      throw ContractError("episode " + std::to_string(i) + ": " + err.what());
    }
    for (std::size_t t = 0; t < e.length(); ++t) {
      if (e.states[t].size() != info.state_dim || e.actions[t].size() != info.act_dim) {
        throw DimensionError("episode " + std::to_string(i) + " step " + std::to_string(t) +
                             " does not match dataset dimensions");
      }
    }
  }
}

}  // namespace ares::data
