#include "ares/reward_map/distance.hpp"

#include <cmath>

#include "ares/core/error.hpp"

namespace ares::reward_map {

DistanceConfig DistanceConfig::preset(std::string_view name) {
  if (name == "5110") return DistanceConfig{5, 1, 1, Rounding::none, Aggregation::mean};
  if (name == "5220") return DistanceConfig{5, 2, 2, Rounding::none, Aggregation::mean};
  throw ConfigError("unknown distance preset '" + std::string(name) + "' (known: 5110, 5220)");
}

std::string DistanceConfig::preset_name() const {
  return std::to_string(k_neighbors) + std::to_string(p_state) + std::to_string(p_action) +
         std::to_string(static_cast<int>(rounding));
}

void DistanceConfig::validate() const {
  if (k_neighbors == 0) throw ConfigError("k_neighbors must be positive");
  if (p_state != 1 && p_state != 2) throw ConfigError("p_state must be 1 or 2");
  if (p_action != 1 && p_action != 2) throw ConfigError("p_action must be 1 or 2");
}

Rounding rounding_from_int(int mode) {
  if (mode < 0 || mode > 3) throw ConfigError("rounding mode must be 0..3, got " + std::to_string(mode));
  return static_cast<Rounding>(mode);
}

Vec round_key(std::span<const double> key, Rounding mode) {
  Vec out(key.begin(), key.end());
  switch (mode) {
    case Rounding::none:
      break;
    case Rounding::tenth:
      for (double& v : out) v = std::round(v * 10.0) / 10.0;
      break;
    case Rounding::half:
      for (double& v : out) v = std::round(v * 2.0) / 2.0;
      break;
    case Rounding::integer:
      for (double& v : out) v = std::round(v);
      break;
  }
  return out;
}

namespace {

double norm_part(std::span<const double> a, std::span<const double> b, std::size_t begin, std::size_t end, int p) {
  double total = 0.0;
  if (p == 1) {
    for (std::size_t i = begin; i < end; ++i) total += std::abs(a[i] - b[i]);
    return total;
  }
  for (std::size_t i = begin; i < end; ++i) total += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(total);
}

}  // namespace

double SplitMetric::operator()(std::span<const double> a, std::span<const double> b) const {
  return norm_part(a, b, 0, state_dim, p_state) + norm_part(a, b, state_dim, a.size(), p_action);
}

}  // namespace ares::reward_map
