#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ares/core/error.hpp"
#include "ares/core/rng.hpp"
#include "ares/reward_map/reward_map.hpp"

using namespace ares;
using namespace ares::reward_map;

namespace {

// Brute-force oracle: distance sort with insertion-order tie-break.
std::vector<std::size_t> scan(const std::vector<Vec>& keys, const Vec& q, std::size_t state_dim, int ps, int pa,
                              std::size_t k) {
  auto part = [](const Vec& a, const Vec& b, std::size_t lo, std::size_t hi, int p) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += p == 1 ? std::abs(a[i] - b[i]) : (a[i] - b[i]) * (a[i] - b[i]);
    return p == 1 ? s : std::sqrt(s);
  };
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < keys.size(); ++i)
    d.push_back({part(keys[i], q, 0, state_dim, ps) + part(keys[i], q, state_dim, q.size(), pa), i});
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, d.size()); ++i) out.push_back(d[i].second);
  return out;
}

ShapedRewardMap random_map(Rng& rng, std::size_t n, std::size_t sd, std::size_t ad, DistanceConfig cfg) {
  std::vector<Vec> keys;
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    Vec k(sd + ad);
    for (double& v : k) v = rng.uniform(-3, 3);
    keys.push_back(k);
    values.push_back(rng.uniform(-1, 1));
  }
  return ShapedRewardMap(sd, ad, cfg, keys, values);
}

data::ShapedSample sample(Vec s, Vec a, double r) { return {std::move(s), std::move(a), r}; }

}  // namespace

TEST_CASE("round_key") {
  const Vec a = round_key(Vec{1.26, -0.24}, Rounding::tenth);
  CHECK(a[0] == doctest::Approx(1.3));
  CHECK(a[1] == doctest::Approx(-0.2));
  CHECK(round_key(Vec{0.75}, Rounding::half) == Vec{1.0});
  CHECK(round_key(Vec{-0.25}, Rounding::half) == Vec{-0.5});
  CHECK(round_key(Vec{2.5, -2.5}, Rounding::integer) == Vec{3.0, -3.0});
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec k{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    CHECK(round_key(k, Rounding::none) == k);
    for (Rounding m : {Rounding::tenth, Rounding::half, Rounding::integer}) {
      const Vec once = round_key(k, m);
      CHECK(round_key(once, m) == once);
    }
  }
  CHECK_THROWS_AS(rounding_from_int(4), ConfigError);
}

TEST_CASE("distance presets") {
  const DistanceConfig a = DistanceConfig::preset("5110");
  CHECK(a.k_neighbors == 5);
  CHECK(a.p_state == 1);
  CHECK(a.p_action == 1);
  CHECK(a.rounding == Rounding::none);
  const DistanceConfig b = DistanceConfig::preset("5220");
  CHECK(b.p_state == 2);
  CHECK(b.p_action == 2);
  CHECK(b.preset_name() == "5220");
  CHECK_THROWS_AS(DistanceConfig::preset("9999"), ConfigError);
  const SplitMetric m{2, 2, 1};
  CHECK(m(Vec{0, 0, 0}, Vec{3, 4, -2}) == 7.0);
}

TEST_CASE("build_map") {
  SUBCASE("single entry answers every query") {
    const std::vector<data::ShapedSample> s{sample({1.0}, {2.0}, 0.25)};
    const auto map = build_map(s, DistanceConfig::preset("5110"));
    Rng rng(1);
    for (int i = 0; i < 20; ++i) CHECK(map.lookup(Vec{rng.uniform(-50, 50)}, Vec{rng.uniform(-5, 5)}) == 0.25);
  }
  SUBCASE("duplicates after rounding keep the last value") {
    DistanceConfig cfg;
    cfg.rounding = Rounding::integer;
    const std::vector<data::ShapedSample> s{sample({1.2}, {0}, 1.0), sample({5}, {1}, 3.0), sample({0.9}, {0}, 2.0)};
    const auto map = build_map(s, cfg);
    REQUIRE(map.size() == 2);
    CHECK(map.keys()[0] == Vec{1, 0});
    CHECK(map.values()[0] == 2.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_map(std::vector<data::ShapedSample>{}, DistanceConfig{}), ContractError);
    CHECK_THROWS_AS(ShapedRewardMap(1, 1, DistanceConfig{}, {Vec{0, 0}}, {1.0, 2.0}), DimensionError);
  }
}

TEST_CASE("kd-tree neighbors equal a linear scan") {
  Rng rng(77);
  for (auto [ps, pa] : {std::pair{1, 1}, {2, 2}, {2, 1}}) {
    DistanceConfig cfg;
    cfg.p_state = ps;
    cfg.p_action = pa;
    const auto map = random_map(rng, 10000, 3, 1, cfg);
    for (int q = 0; q < 1000; ++q) {
      Vec key(4);
      for (double& v : key) v = rng.uniform(-3.5, 3.5);
      const auto got = map.neighbors(key, 5);
      const auto want = scan(map.keys(), key, 3, ps, pa, 5);
      REQUIRE(got.size() == 5);
      for (std::size_t i = 0; i < 5; ++i) CHECK(got[i].index == want[i]);
    }
  }
}

TEST_CASE("ties resolve by insertion order") {
  const ShapedRewardMap map(1, 1, DistanceConfig{}, {Vec{1, 0}, Vec{-1, 0}, Vec{0, 1}, Vec{0, -1}}, {1, 2, 3, 4});
  const auto n = map.neighbors(Vec{0, 0}, 4);
  CHECK(n[0].index == 0);
  CHECK(n[1].index == 1);
  CHECK(n[2].index == 2);
  CHECK(n[3].index == 3);
}

TEST_CASE("lookup") {
  SUBCASE("exact key with k=1") {
    DistanceConfig cfg;
    cfg.k_neighbors = 1;
    Rng rng(4);
    const auto map = random_map(rng, 300, 2, 1, cfg);
    for (std::size_t i = 0; i < map.size(); ++i) {
      const Vec& k = map.keys()[i];
      CHECK(map.lookup(Vec{k[0], k[1]}, Vec{k[2]}) == map.values()[i]);
    }
  }
  SUBCASE("k larger than the map averages everything") {
    const ShapedRewardMap map(1, 1, DistanceConfig{}, {Vec{0, 0}, Vec{5, 1}, Vec{9, 2}}, {1.0, 2.0, 6.0});
    CHECK(map.lookup(Vec{100}, Vec{0}) == doctest::Approx(3.0));
  }
  SUBCASE("5-NN on seven crafted points") {
    const std::vector<Vec> keys{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {10, 0}, {-6, 1}};
    const std::vector<double> values{1, 2, 3, 4, 5, 100, -100};
    const ShapedRewardMap map(1, 1, DistanceConfig::preset("5110"), keys, values);
    const auto idx = scan(keys, Vec{1.4, 0}, 1, 1, 1, 5);
    double want = 0;
    for (auto i : idx) want += values[i] / 5.0;
    CHECK(want == doctest::Approx(3.0));
    CHECK(map.lookup(Vec{1.4}, Vec{0}) == doctest::Approx(want));
  }
  SUBCASE("matches the brute-force mean on random instances") {
    Rng rng(90);
    for (int inst = 0; inst < 1000; ++inst) {
      DistanceConfig cfg;
      cfg.k_neighbors = 1 + rng.index(6);
      cfg.p_state = rng.bernoulli(0.5) ? 1 : 2;
      cfg.p_action = rng.bernoulli(0.5) ? 1 : 2;
      const auto map = random_map(rng, 1 + rng.index(40), 2, 1, cfg);
      const Vec s{rng.uniform(-3, 3), rng.uniform(-3, 3)}, a{rng.uniform(-3, 3)};
      const auto idx = scan(map.keys(), Vec{s[0], s[1], a[0]}, 2, cfg.p_state, cfg.p_action, cfg.k_neighbors);
      double want = 0;
      for (auto i : idx) want += map.values()[i];
      want /= static_cast<double>(idx.size());
      CHECK(map.lookup(s, a) == doctest::Approx(want).epsilon(1e-12));
    }
  }
  SUBCASE("dimension mismatch") {
    const ShapedRewardMap map(1, 1, DistanceConfig{}, {Vec{0, 0}}, {1.0});
    CHECK_THROWS_AS(map.lookup(Vec{0, 0}, Vec{0}), DimensionError);
  }
}

TEST_CASE("normalize") {
  auto values_after = [](std::vector<double> v) {
    std::vector<Vec> keys;
    for (std::size_t i = 0; i < v.size(); ++i) keys.push_back({static_cast<double>(i), 0});
    return normalize(ShapedRewardMap(1, 1, DistanceConfig{}, keys, v)).values();
  };
  CHECK(values_after({2, 4, -1}) == std::vector<double>{0.5, 1.0, -0.25});
  CHECK(values_after({1, 1, 1}) == std::vector<double>{1, 1, 1});
  const auto neg = values_after({-3, -1});
  CHECK(neg[0] == -1.0);
  CHECK(neg[1] == doctest::Approx(-1.0 / 3.0));
  CHECK(values_after({0, 0}) == std::vector<double>{0, 0});

  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto map = random_map(rng, 30, 1, 1, DistanceConfig{});
    const auto out = normalize(map).values();
    double top = 0;
    for (double v : out) top = std::max(top, std::abs(v));
    CHECK(top == doctest::Approx(1.0));
    const auto& in = map.values();
    CHECK(std::max_element(in.begin(), in.end()) - in.begin() == std::max_element(out.begin(), out.end()) - out.begin());
    for (std::size_t a = 0; a + 1 < in.size(); ++a) CHECK((in[a] < in[a + 1]) == (out[a] < out[a + 1]));
  }
}

TEST_CASE("merge_rewards") {
  MergeConfig cfg;
  SUBCASE("identical keys merge to the mean") {
    const ShapedRewardMap map(1, 1, DistanceConfig{}, {Vec{1, 1}, Vec{1, 1}}, {2.0, 4.0});
    cfg.epsilon = 1e-9;
    const auto r = merge_rewards(map, cfg);
    REQUIRE(r.map.size() == 1);
    CHECK(r.map.values()[0] == 3.0);
    CHECK(r.events.size() == 1);
  }
  SUBCASE("epsilon below every distance is a no-op") {
    Rng rng(2);
    const auto map = random_map(rng, 50, 2, 1, DistanceConfig{});
    cfg.epsilon = 1e-6;
    const auto r = merge_rewards(map, cfg);
    CHECK(r.map.keys() == map.keys());
    CHECK(r.map.values() == map.values());
    CHECK(r.events.empty());
  }
  SUBCASE("three collinear points, spacing just under epsilon") {
    // Pass by hand: (0,1) merge at 0.4995 (< 1), then 0.4995 vs 1.998 is
    // 1.4985, not merged. Two entries remain.
    const ShapedRewardMap map(1, 1, DistanceConfig{}, {Vec{0, 0}, Vec{0.999, 0}, Vec{1.998, 0}}, {1, 3, 8});
    cfg.epsilon = 1.0;
    const auto r = merge_rewards(map, cfg);
    REQUIRE(r.map.size() == 2);
    CHECK(r.map.keys()[0][0] == doctest::Approx(0.4995));
    CHECK(r.map.values()[0] == 2.0);
    CHECK(r.map.keys()[1][0] == 1.998);
    CHECK(r.map.values()[1] == 8.0);
  }
  SUBCASE("merged slot keeps absorbing") {
    const ShapedRewardMap map(1, 1, DistanceConfig{}, {Vec{0, 0}, Vec{0.6, 0}, Vec{0.9, 0}}, {0, 4, 8});
    cfg.epsilon = 0.7;
    const auto r = merge_rewards(map, cfg);
    REQUIRE(r.map.size() == 1);
    CHECK(r.map.keys()[0][0] == doctest::Approx(0.6));
    CHECK(r.map.values()[0] == 5.0);
  }
  SUBCASE("properties") {
    Rng rng(8);
    for (int i = 0; i < 100; ++i) {
      const auto map = random_map(rng, 60, 1, 1, DistanceConfig{});
      cfg.epsilon = rng.uniform(0.01, 2.0);
      const auto r = merge_rewards(map, cfg);
      CHECK(r.map.size() <= map.size());
      CHECK(r.map.size() + r.events.size() == map.size());
      const auto [lo, hi] = std::minmax_element(map.values().begin(), map.values().end());
      for (double v : r.map.values()) {
        CHECK(v >= *lo);
        CHECK(v <= *hi);
      }
    }
  }
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("map file round trip is exact") {
  Rng rng(13);
  DistanceConfig cfg = DistanceConfig::preset("5220");
  cfg.rounding = Rounding::half;
  cfg.aggregation = Aggregation::inverse_distance;
  const auto map = random_map(rng, 40, 4, 1, cfg);
  std::stringstream buf;
  save_map(map, buf);
  const std::string text = buf.str();
  const auto back = load_map(buf);
  CHECK(back.config() == map.config());
  CHECK(back.keys() == map.keys());
  CHECK(back.values() == map.values());
  CHECK(back.state_dim() == 4);
  std::stringstream again;
  save_map(back, again);
  CHECK(again.str() == text);

  std::stringstream cut(text.substr(0, text.size() - 40));
  CHECK_THROWS_AS(load_map(cut), ParseError);
  std::stringstream wrong("not-a-map 1\n");
  CHECK_THROWS_AS(load_map(wrong), ParseError);
}
