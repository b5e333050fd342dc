#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "ares/data/episode.hpp"
#include "ares/reward_map/distance.hpp"
#include "ares/reward_map/kd_tree.hpp"

namespace ares::reward_map {

// Nearest-neighbor map from concatenated (state, action) keys to shaped
// rewards. Immutable once built; safe to share between reader threads.
class ShapedRewardMap {
 public:
  // Keys are stored as given (no rounding or de-duplication).
  ShapedRewardMap(std::size_t state_dim, std::size_t act_dim, DistanceConfig config, std::vector<Vec> keys,
                  std::vector<double> values);

  std::size_t size() const { return keys_.size(); }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t act_dim() const { return act_dim_; }
  const DistanceConfig& config() const { return config_; }
  const std::vector<Vec>& keys() const { return keys_; }
  const std::vector<double>& values() const { return values_; }

  // k nearest stored keys to an already-preprocessed key.
  std::vector<Neighbor> neighbors(std::span<const double> key, std::size_t k) const;

  // Rounds concat(state, action) per the config and aggregates the values of
  // the k_neighbors nearest keys (all keys when the map is smaller).
  double lookup(std::span<const double> state, std::span<const double> action) const;

 private:
  std::size_t state_dim_;
  std::size_t act_dim_;
  DistanceConfig config_;
  std::vector<Vec> keys_;
  std::vector<double> values_;
  KdTree index_;
};

// Rounds every key, keeps one entry per rounded key (first position, last
// value) and indexes the result. Throws ContractError on empty input.
ShapedRewardMap build_map(std::span<const data::ShapedSample> samples, const DistanceConfig& config);

// Divides every value by the largest magnitude. All-zero maps are returned
// unchanged.
ShapedRewardMap normalize(const ShapedRewardMap& map);

struct MergeConfig {
  double epsilon = 0.1;
  int p_state = 2;
  int p_action = 2;

  void validate() const;
};

struct MergeEvent {
  std::size_t survivor = 0;  // position (in the input map) of the surviving slot
  std::size_t absorbed = 0;
  double left_value = 0.0;
  double right_value = 0.0;
  double merged_value = 0.0;
};

struct MergeResult {
  ShapedRewardMap map;
  std::vector<MergeEvent> events;
};

// One forward pass over pairs i < j in insertion order. When two live
// entries are closer than epsilon, slot i becomes their coordinate-wise mean
// key with the mean value, slot j is dropped, and the merged slot keeps
// being compared against later entries.
MergeResult merge_rewards(const ShapedRewardMap& map, const MergeConfig& config);

// Line-oriented text format documented in docs/formats.md.
void save_map(const ShapedRewardMap& map, std::ostream& out);
void save_map(const ShapedRewardMap& map, const std::filesystem::path& path);
ShapedRewardMap load_map(std::istream& in);
ShapedRewardMap load_map(const std::filesystem::path& path);

}  // namespace ares::reward_map
