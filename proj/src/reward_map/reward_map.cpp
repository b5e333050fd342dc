#include "ares/reward_map/reward_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "ares/core/error.hpp"
#include "ares/core/format.hpp"

namespace ares::reward_map {
namespace {

std::vector<double> flatten(const std::vector<Vec>& keys, std::size_t dim) {
  std::vector<double> flat;
  flat.reserve(keys.size() * dim);
  for (const Vec& k : keys) {
    if (k.size() != dim) throw DimensionError("reward map key has " + std::to_string(k.size()) + " coordinates, expected " + std::to_string(dim));
    flat.insert(flat.end(), k.begin(), k.end());
  }
  return flat;
}

}  // namespace

ShapedRewardMap::ShapedRewardMap(std::size_t state_dim, std::size_t act_dim, DistanceConfig config,
                                 std::vector<Vec> keys, std::vector<double> values)
    : state_dim_(state_dim), act_dim_(act_dim), config_(config), keys_(std::move(keys)), values_(std::move(values)) {
  config_.validate();
  if (keys_.empty()) throw ContractError("reward map needs at least one entry");
  if (keys_.size() != values_.size()) throw DimensionError("reward map keys and values differ in count");
  index_ = KdTree(flatten(keys_, state_dim_ + act_dim_), state_dim_ + act_dim_,
                  SplitMetric{state_dim_, config_.p_state, config_.p_action});
}

std::vector<Neighbor> ShapedRewardMap::neighbors(std::span<const double> key, std::size_t k) const {
  return index_.nearest(key, k);
}

double ShapedRewardMap::lookup(std::span<const double> state, std::span<const double> action) const {
  if (state.size() != state_dim_ || action.size() != act_dim_) {
    throw DimensionError("lookup key (" + std::to_string(state.size()) + " + " + std::to_string(action.size()) +
                         ") does not match map dimensions (" + std::to_string(state_dim_) + " + " +
                         std::to_string(act_dim_) + ")");
  }
  Vec key(state.begin(), state.end());
  key.insert(key.end(), action.begin(), action.end());
  key = round_key(key, config_.rounding);
  const auto hits = index_.nearest(key, config_.k_neighbors);
  if (config_.aggregation == Aggregation::inverse_distance) {
    double exact_sum = 0.0;
    std::size_t exact = 0;
    for (const auto& n : hits) {
      if (n.distance == 0.0) {
        exact_sum += values_[n.index];
        ++exact;
      }
    }
    if (exact > 0) return exact_sum / static_cast<double>(exact);
    double num = 0.0;
    double den = 0.0;
    for (const auto& n : hits) {
      num += values_[n.index] / n.distance;
      den += 1.0 / n.distance;
    }
    return num / den;
  }
  double total = 0.0;
  for (const auto& n : hits) total += values_[n.index];
  return total / static_cast<double>(hits.size());
}

ShapedRewardMap build_map(std::span<const data::ShapedSample> samples, const DistanceConfig& config) {
  if (samples.empty()) throw ContractError("cannot build a reward map from zero entries");
  const std::size_t state_dim = samples.front().state.size();
  const std::size_t act_dim = samples.front().action.size();
  std::vector<Vec> keys;
  std::vector<double> values;
  std::map<Vec, std::size_t> position;
  for (const auto& s : samples) {
    if (s.state.size() != state_dim || s.action.size() != act_dim) {
      throw DimensionError("reward map entries have inconsistent state/action widths");
    }
    Vec raw = s.state;
    raw.insert(raw.end(), s.action.begin(), s.action.end());
    Vec key = round_key(raw, config.rounding);
    auto [it, inserted] = position.try_emplace(key, keys.size());
    if (inserted) {
      keys.push_back(std::move(key));
      values.push_back(s.reward);
    } else {
      values[it->second] = s.reward;
    }
  }
  return ShapedRewardMap(state_dim, act_dim, config, std::move(keys), std::move(values));
}

ShapedRewardMap normalize(const ShapedRewardMap& map) {
  double largest = 0.0;
  for (double v : map.values()) largest = std::max(largest, std::abs(v));
  if (largest == 0.0) return map;
  std::vector<double> values = map.values();
  for (double& v : values) v /= largest;
  return ShapedRewardMap(map.state_dim(), map.act_dim(), map.config(), map.keys(), std::move(values));
}

void MergeConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("merge epsilon must be positive");
  if (p_state != 1 && p_state != 2) throw ConfigError("merge p_state must be 1 or 2");
  if (p_action != 1 && p_action != 2) throw ConfigError("merge p_action must be 1 or 2");
}

MergeResult merge_rewards(const ShapedRewardMap& map, const MergeConfig& config) {
  config.validate();
  const SplitMetric metric{map.state_dim(), config.p_state, config.p_action};
  std::vector<Vec> keys = map.keys();
  std::vector<double> values = map.values();
  std::vector<bool> live(keys.size(), true);
  std::vector<MergeEvent> events;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!live[i]) continue;
    for (std::size_t j = i + 1; j < keys.size(); ++j) {
      if (!live[j] || metric(keys[i], keys[j]) >= config.epsilon) continue;
      const double merged = 0.5 * (values[i] + values[j]);
      events.push_back({i, j, values[i], values[j], merged});
      for (std::size_t d = 0; d < keys[i].size(); ++d) keys[i][d] = 0.5 * (keys[i][d] + keys[j][d]);
      values[i] = merged;
      live[j] = false;
    }
  }
  std::vector<Vec> out_keys;
  std::vector<double> out_values;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!live[i]) continue;
    out_keys.push_back(std::move(keys[i]));
    out_values.push_back(values[i]);
  }
  return MergeResult{ShapedRewardMap(map.state_dim(), map.act_dim(), map.config(), std::move(out_keys),
                                     std::move(out_values)),
                     std::move(events)};
}

namespace {

constexpr const char* kMagic = "ares-reward-map";
constexpr int kVersion = 1;

const char* aggregation_name(Aggregation a) { return a == Aggregation::mean ? "mean" : "inverse_distance"; }

}  // namespace

void save_map(const ShapedRewardMap& map, std::ostream& out) {
  const DistanceConfig& c = map.config();
  out << kMagic << ' ' << kVersion << '\n';
  out << "state_dim " << map.state_dim() << '\n';
  out << "act_dim " << map.act_dim() << '\n';
  out << "k_neighbors " << c.k_neighbors << '\n';
  out << "p_state " << c.p_state << '\n';
  out << "p_action " << c.p_action << '\n';
  out << "rounding " << static_cast<int>(c.rounding) << '\n';
  out << "aggregation " << aggregation_name(c.aggregation) << '\n';
  out << "entries " << map.size() << '\n';
  for (std::size_t i = 0; i < map.size(); ++i) {
    for (double v : map.keys()[i]) out << format_double(v) << ' ';
    out << format_double(map.values()[i]) << '\n';
  }
  if (!out) throw IoError("failed writing reward map");
}

void save_map(const ShapedRewardMap& map, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_map(map, out);
}

ShapedRewardMap load_map(std::istream& in) {
  std::size_t line_no = 0;
  auto next = [&]() {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("reward map truncated after line " + std::to_string(line_no));
    ++line_no;
    std::istringstream words(line);
    std::vector<std::string> out;
    for (std::string w; words >> w;) out.push_back(w);
    return out;
  };
  auto fail = [&](const std::string& what) -> void {
    throw ParseError("reward map line " + std::to_string(line_no) + ": " + what);
  };
  auto number = [&](const std::string& text) {
    auto v = parse_double(text);
    if (!v) fail("bad number '" + text + "'");
    return *v;
  };
  auto field = [&](const char* key) {
    auto words = next();
    if (words.size() != 2 || words[0] != key) fail(std::string("expected '") + key + " <value>'");
    return words[1];
  };
  auto integer = [&](const char* key) {
    const double v = number(field(key));
    if (v < 0 || v != std::floor(v)) fail(std::string(key) + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
  };

  auto header = next();
  if (header.size() != 2 || header[0] != kMagic) fail("not a reward map file");
  if (header[1] != std::to_string(kVersion)) fail("unsupported reward map version " + header[1]);
  const std::size_t state_dim = integer("state_dim");
  const std::size_t act_dim = integer("act_dim");
  DistanceConfig c;
  c.k_neighbors = integer("k_neighbors");
  c.p_state = static_cast<int>(integer("p_state"));
  c.p_action = static_cast<int>(integer("p_action"));
  c.rounding = rounding_from_int(static_cast<int>(integer("rounding")));
  const std::string agg = field("aggregation");
  if (agg == "mean") {
    c.aggregation = Aggregation::mean;
  } else if (agg == "inverse_distance") {
    c.aggregation = Aggregation::inverse_distance;
  } else {
    fail("unknown aggregation '" + agg + "'");
  }
  const std::size_t n = integer("entries");
  std::vector<Vec> keys;
  std::vector<double> values;
  keys.reserve(n);
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto words = next();
    if (words.size() != state_dim + act_dim + 1) fail("expected " + std::to_string(state_dim + act_dim + 1) + " numbers");
    Vec key;
    for (std::size_t d = 0; d < state_dim + act_dim; ++d) key.push_back(number(words[d]));
    keys.push_back(std::move(key));
    values.push_back(number(words.back()));
  }
  return ShapedRewardMap(state_dim, act_dim, c, std::move(keys), std::move(values));
}

ShapedRewardMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open reward map " + path.string());
  return load_map(in);
}

}  // namespace ares::reward_map
