#include "ares/envs/episode_split.hpp"

#include <string>

#include "ares/core/error.hpp"

namespace ares::envs {

data::Dataset split_delayed_episodes(const data::Dataset& dataset) {
  data::Dataset out;
  out.info = dataset.info;
  out.info.params["split_from"] = dataset.info.policy;
  for (std::size_t e = 0; e < dataset.episodes.size(); ++e) {
    const data::Episode& ep = dataset.episodes[e];
    if (!ep.rewards) throw ContractError("episode " + std::to_string(e) + " has no per-step reward trace to split");
    const auto& rewards = *ep.rewards;
    std::size_t begin = 0;
    std::size_t fragment = 0;
    for (std::size_t t = 0; t < ep.length(); ++t) {
      if (rewards[t] == 0.0 && t + 1 < ep.length()) continue;
      data::Episode piece;
      piece.states.assign(ep.states.begin() + begin, ep.states.begin() + t + 1);
      piece.actions.assign(ep.actions.begin() + begin, ep.actions.begin() + t + 1);
      piece.rewards = std::vector<double>(rewards.begin() + begin, rewards.begin() + t + 1);
      piece.episode_return = rewards[t];
      piece.meta = ep.meta;
      piece.meta["source_episode"] = std::to_string(e);
      piece.meta["fragment"] = std::to_string(fragment++);
      out.episodes.push_back(std::move(piece));
      begin = t + 1;
    }
  }
  return out;
}

}  // namespace ares::envs
