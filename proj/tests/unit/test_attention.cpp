#include <doctest.h>

#include <cmath>

#include "ares/core/error.hpp"
#include "ares/nn/layers.hpp"
#include "ares/nn/ops.hpp"

using namespace ares;
using namespace ares::nn;

namespace {

Tensor random_tokens(std::size_t T, std::size_t h, Rng& rng) {
  Tensor t({T, h});
  for (double& v : t.data()) v = rng.uniform(-1, 1);
  return t;
}

}  // namespace

TEST_CASE("attention rows are causal and stochastic") {
  Rng rng(5);
  CausalSelfAttention layer("attn", 6, rng);
  const Tensor tokens = random_tokens(7, 6, rng);
  const AttentionResult r = causal_attention_forward(tokens, layer);
  for (std::size_t i = 0; i < 7; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 7; ++j) {
      if (j > i) CHECK(r.attention(i, j) == 0.0);
      CHECK(r.attention(i, j) >= 0.0);
      sum += r.attention(i, j);
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("single token: keeping column 0 changes nothing") {
  Rng rng(6);
  CausalSelfAttention layer("attn", 4, rng);
  const Tensor tokens = random_tokens(1, 4, rng);
  const AttentionResult plain = causal_attention_forward(tokens, layer);
  const AttentionResult kept = causal_attention_forward(tokens, layer, 0);
  CHECK(plain.attention == Tensor::matrix({{1.0}}));
  CHECK(plain.output == kept.output);
}

TEST_CASE("final-row keep zeroes the rest without rescaling") {
  Rng rng(8);
  CausalSelfAttention layer("attn", 5, rng);
  const Tensor tokens = random_tokens(6, 5, rng);
  const AttentionResult plain = causal_attention_forward(tokens, layer);
  for (std::size_t t = 0; t < 6; ++t) {
    const AttentionResult kept = causal_attention_forward(tokens, layer, t);
    for (std::size_t j = 0; j < 6; ++j) {
      if (j == t) {
        CHECK(kept.attention(5, j) == plain.attention(5, j));
      } else {
        CHECK(kept.attention(5, j) == 0.0);
      }
    }
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 6; ++j) CHECK(kept.attention(i, j) == plain.attention(i, j));
  }
  CHECK_THROWS_AS(causal_attention_forward(tokens, layer, 6), IndexError);
}

TEST_CASE("T=2 keep column 0: final row is [a21, 0]") {
  Rng rng(9);
  CausalSelfAttention layer("attn", 3, rng);
  const Tensor tokens = random_tokens(2, 3, rng);
  const AttentionResult plain = causal_attention_forward(tokens, layer);
  const AttentionResult kept = causal_attention_forward(tokens, layer, 0);
  CHECK(kept.attention(1, 0) == plain.attention(1, 0));
  CHECK(kept.attention(1, 1) == 0.0);
  CHECK(plain.attention(1, 0) > 0.0);
  CHECK(plain.attention(1, 0) < 1.0);
}

TEST_CASE("attention matches a dense reference for h=2, T=2") {
  Rng rng(1);
  CausalSelfAttention layer("attn", 2, rng);
  auto set = [](Linear& l, std::initializer_list<double> w, std::initializer_list<double> b) {
    l.weight.value = Tensor({2, 2}, std::vector<double>(w));
    l.bias.value = Tensor({2}, std::vector<double>(b));
  };
  set(layer.query, {0.5, -0.3, 0.8, 0.1}, {0.05, -0.02});
  set(layer.key, {-0.4, 0.9, 0.2, 0.6}, {0.0, 0.1});
  set(layer.value, {1.1, 0.0, -0.7, 0.3}, {0.2, -0.1});
  set(layer.proj, {0.6, -0.5, 0.4, 1.2}, {-0.05, 0.07});
  const Tensor x = Tensor::matrix({{0.3, -1.0}, {0.7, 0.25}});

  // Dense reference: W stored [in][out], y = x W + b.
  auto aff = [](const double* in, const std::vector<double>& w, const std::vector<double>& b, double* out) {
    out[0] = in[0] * w[0] + in[1] * w[2] + b[0];
    out[1] = in[0] * w[1] + in[1] * w[3] + b[1];
  };
  const std::vector<double> wq{0.5, -0.3, 0.8, 0.1}, bq{0.05, -0.02};
  const std::vector<double> wk{-0.4, 0.9, 0.2, 0.6}, bk{0.0, 0.1};
  const std::vector<double> wv{1.1, 0.0, -0.7, 0.3}, bv{0.2, -0.1};
  const std::vector<double> wo{0.6, -0.5, 0.4, 1.2}, bo{-0.05, 0.07};
  const double xs[2][2] = {{0.3, -1.0}, {0.7, 0.25}};
  double q[2][2], k[2][2], v[2][2];
  for (int i = 0; i < 2; ++i) {
    aff(xs[i], wq, bq, q[i]);
    aff(xs[i], wk, bk, k[i]);
    aff(xs[i], wv, bv, v[i]);
  }
  const double s = 1.0 / std::sqrt(2.0);
  const double s10 = (q[1][0] * k[0][0] + q[1][1] * k[0][1]) * s;
  const double s11 = (q[1][0] * k[1][0] + q[1][1] * k[1][1]) * s;
  const double a10 = 1.0 / (1.0 + std::exp(s11 - s10));
  const double a11 = 1.0 - a10;

  SUBCASE("unmasked") {
    const AttentionResult r = causal_attention_forward(x, layer);
    CHECK(std::abs(r.attention(1, 0) - a10) < 1e-12);
    CHECK(std::abs(r.attention(1, 1) - a11) < 1e-12);
    double row0[2], mixed1[2] = {a10 * v[0][0] + a11 * v[1][0], a10 * v[0][1] + a11 * v[1][1]}, row1[2];
    aff(v[0], wo, bo, row0);
    aff(mixed1, wo, bo, row1);
    CHECK(std::abs(r.output(0, 0) - row0[0]) < 1e-10);
    CHECK(std::abs(r.output(0, 1) - row0[1]) < 1e-10);
    CHECK(std::abs(r.output(1, 0) - row1[0]) < 1e-10);
    CHECK(std::abs(r.output(1, 1) - row1[1]) < 1e-10);
  }
  SUBCASE("keep each column") {
    for (int t = 0; t < 2; ++t) {
      const double a = t == 0 ? a10 : a11;
      double mixed[2] = {a * v[t][0], a * v[t][1]}, out[2];
      aff(mixed, wo, bo, out);
      const AttentionResult r = causal_attention_forward(x, layer, static_cast<std::size_t>(t));
      CHECK(std::abs(r.output(1, 0) - out[0]) < 1e-10);
      CHECK(std::abs(r.output(1, 1) - out[1]) < 1e-10);
    }
  }
}
