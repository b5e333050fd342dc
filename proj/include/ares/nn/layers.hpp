#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ares/core/rng.hpp"
#include "ares/nn/autodiff.hpp"

namespace ares::nn {

// Dense layer y = x W + b with W stored [in, out]. Weights start uniform in
// +-1/sqrt(in), biases at zero.
struct Linear {
  Parameter weight;
  Parameter bias;

  Linear() = default;
  Linear(const std::string& name, std::size_t in, std::size_t out, Rng& rng);

  std::size_t in_dim() const { return weight.value.rows(); }
  std::size_t out_dim() const { return weight.value.cols(); }

  Var forward(Tape& tape, Var x);
  void collect(std::vector<Parameter*>& out);
};

struct LayerNorm {
  Parameter gain;
  Parameter shift;
  double eps = 1e-5;

  LayerNorm() = default;
  LayerNorm(const std::string& name, std::size_t dim);

  Var forward(Tape& tape, Var x);
  void collect(std::vector<Parameter*>& out);
};

// Sum of per-component lookup tables: token column c (an integer index in
// [0, vocab[c])) selects a row of table c. Replaces the linear token
// embedding for fully discrete state/action spaces.
struct DiscreteEmbedding {
  std::vector<Parameter> tables;

  DiscreteEmbedding() = default;
  DiscreteEmbedding(const std::string& name, const std::vector<std::size_t>& vocab, std::size_t out, Rng& rng);

  Var forward(Tape& tape, const Tensor& tokens);
  void collect(std::vector<Parameter*>& out);
};

struct AttentionOptions {
  // Absolute position of the first query row. Queries before this offset are
  // not computed; the keys and values still span the whole sequence.
  std::size_t query_offset = 0;
  // When set, the final attention row keeps only this column (0-based).
  std::optional<std::size_t> final_row_keep;
  double dropout_p = 0.0;
  Rng* dropout_rng = nullptr;
};

struct AttentionVars {
  Var output;
  Var attention;
};

struct AttentionWeights {
  Var attention;  // [T - query_offset, T] causal softmax weights
  Var values;     // [T, h_dim]
};

// Single-head masked causal self-attention with output projection. Scores
// are scaled by 1/sqrt(h_dim).
struct CausalSelfAttention {
  Linear query;
  Linear key;
  Linear value;
  Linear proj;

  CausalSelfAttention() = default;
  CausalSelfAttention(const std::string& name, std::size_t h_dim, Rng& rng);

  AttentionVars forward(Tape& tape, Var x, const AttentionOptions& options);

  // The two halves of forward(): weights for the query rows from
  // query_offset on, then dropout(attention) . values through the output
  // projection (with dropout).
  AttentionWeights weights(Tape& tape, Var x, std::size_t query_offset);
  Var mix(Tape& tape, Var attention, Var values, double dropout_p, Rng* dropout_rng);
  void collect(std::vector<Parameter*>& out);
};

struct AttentionResult {
  Tensor output;     // [T, h_dim]
  Tensor attention;  // [T, T], effective (post-mask) weights
};

// Full-sequence attention forward without recording gradients.
// final_row_keep is a 0-based column index into the final row.
AttentionResult causal_attention_forward(const Tensor& tokens, CausalSelfAttention& layer,
                                         std::optional<std::size_t> final_row_keep = std::nullopt);

}  // namespace ares::nn
