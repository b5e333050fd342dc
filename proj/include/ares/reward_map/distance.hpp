#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ares::reward_map {

using Vec = std::vector<double>;

enum class Rounding { none = 0, tenth = 1, half = 2, integer = 3 };

enum class Aggregation { mean, inverse_distance };

// Lookup metric and preprocessing. Presets "5110" and "5220" name
// (k, p_state, p_action, rounding).
struct DistanceConfig {
  std::size_t k_neighbors = 5;
  int p_state = 1;
  int p_action = 1;
  Rounding rounding = Rounding::none;
  Aggregation aggregation = Aggregation::mean;

  static DistanceConfig preset(std::string_view name);
  std::string preset_name() const;
  void validate() const;

  friend bool operator==(const DistanceConfig&, const DistanceConfig&) = default;
};

// 0 = unchanged, 1 = nearest 0.1, 2 = nearest 0.5, 3 = nearest integer.
// Halfway cases round away from zero.
Vec round_key(std::span<const double> key, Rounding mode);
Rounding rounding_from_int(int mode);

// Distance between concatenated state-action keys: p_state-norm over the
// first state_dim coordinates plus p_action-norm over the rest.
struct SplitMetric {
  std::size_t state_dim = 0;
  int p_state = 2;
  int p_action = 2;

  double operator()(std::span<const double> a, std::span<const double> b) const;
};

}  // namespace ares::reward_map
