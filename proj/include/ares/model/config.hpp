#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ares/nn/adamw.hpp"

namespace ares::model {

// Return-model hyperparameters. Defaults reproduce the published
// architecture: one block, one head, h_dim 512, MLP ratio 8, dropout 0.01,
// sequences up to 1050 tokens.
struct AresConfig {
  std::size_t token_dim = 0;
  std::size_t h_dim = 512;
  std::size_t n_blocks = 1;
  std::size_t n_heads = 1;
  double dropout_p = 0.01;
  std::size_t ff_ratio = 8;
  std::size_t max_T = 1050;
  bool positional_encoding = false;
  // Non-empty: token column c is an integer index into a table of
  // discrete_vocab[c] rows, replacing the linear token embedding.
  std::vector<std::size_t> discrete_vocab;
  double layer_norm_eps = 1e-5;
  nn::AdamWConfig optimizer{};
  std::size_t epochs = 5000;
  std::uint64_t seed = 0;

  // Throws ConfigError for unsupported or inconsistent settings.
  void validate() const;

  friend bool operator==(const AresConfig&, const AresConfig&) = default;
};

inline constexpr std::size_t kEpochsTrainingExpert = 10000;
inline constexpr std::size_t kEpochsRandom = 5000;

}  // namespace ares::model
