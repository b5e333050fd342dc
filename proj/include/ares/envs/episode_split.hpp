#pragma once

#include "ares/data/episode.hpp"

namespace ares::envs {

// Cuts every episode after each nonzero reward; each fragment's return is
// that reward. A rewardless tail becomes a zero-return fragment. Requires
// per-step reward traces.
data::Dataset split_delayed_episodes(const data::Dataset& dataset);

}  // namespace ares::envs
