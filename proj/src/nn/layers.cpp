#include "ares/nn/layers.hpp"

#include <cmath>

#include "ares/core/error.hpp"
#include "ares/nn/ops.hpp"

namespace ares::nn {
namespace {

Tensor uniform_init(Shape shape, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace

Linear::Linear(const std::string& name, std::size_t in, std::size_t out, Rng& rng)
    : weight(name + ".weight", uniform_init({in, out}, in, rng)), bias(name + ".bias", Tensor({out})) {}

Var Linear::forward(Tape& tape, Var x) {
  return add_bias(matmul(x, tape.parameter(weight)), tape.parameter(bias));
}

void Linear::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

LayerNorm::LayerNorm(const std::string& name, std::size_t dim)
    : gain(name + ".gain", Tensor::filled({dim}, 1.0)), shift(name + ".shift", Tensor({dim})) {}

Var LayerNorm::forward(Tape& tape, Var x) {
  return layer_norm(x, tape.parameter(gain), tape.parameter(shift), eps);
}

void LayerNorm::collect(std::vector<Parameter*>& out) {
  out.push_back(&gain);
  out.push_back(&shift);
}

DiscreteEmbedding::DiscreteEmbedding(const std::string& name, const std::vector<std::size_t>& vocab,
                                     std::size_t out, Rng& rng) {
  for (std::size_t c = 0; c < vocab.size(); ++c) {
    // Embedding rows behave like one-hot inputs, so fan-in is 1.
    tables.emplace_back(name + ".table" + std::to_string(c), uniform_init({vocab[c], out}, 1, rng));
  }
}

Var DiscreteEmbedding::forward(Tape& tape, const Tensor& tokens) {
  if (tokens.cols() != tables.size()) {
    throw DimensionError("discrete embedding expects " + std::to_string(tables.size()) + " token columns, got " +
                         std::to_string(tokens.cols()));
  }
  std::optional<Var> sum;
  std::vector<std::size_t> idx(tokens.rows());
  for (std::size_t c = 0; c < tables.size(); ++c) {
    for (std::size_t r = 0; r < tokens.rows(); ++r) {
      const double v = tokens(r, c);
      if (v < 0.0 || v != std::floor(v)) {
        throw ContractError("discrete embedding needs non-negative integer tokens, got " + std::to_string(v));
      }
      idx[r] = static_cast<std::size_t>(v);
    }
    Var part = gather_rows(tape.parameter(tables[c]), idx);
    sum = sum ? add(*sum, part) : part;
  }
  return *sum;
}

void DiscreteEmbedding::collect(std::vector<Parameter*>& out) {
  for (auto& t : tables) out.push_back(&t);
}

CausalSelfAttention::CausalSelfAttention(const std::string& name, std::size_t h_dim, Rng& rng)
    : query(name + ".query", h_dim, h_dim, rng),
      key(name + ".key", h_dim, h_dim, rng),
      value(name + ".value", h_dim, h_dim, rng),
      proj(name + ".proj", h_dim, h_dim, rng) {}

AttentionWeights CausalSelfAttention::weights(Tape& tape, Var x, std::size_t query_offset) {
  const std::size_t length = x.value().rows();
  if (query_offset >= length) {
    throw IndexError("attention query offset " + std::to_string(query_offset) + " beyond sequence length " +
                     std::to_string(length));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(query.out_dim()));
  Var q = query.forward(tape, slice_rows(x, query_offset));
  Var k = key.forward(tape, x);
  Var v = value.forward(tape, x);
  return {causal_softmax(matmul_nt(q, k), scale, query_offset), v};
}

Var CausalSelfAttention::mix(Tape& tape, Var attention, Var values, double dropout_p, Rng* dropout_rng) {
  Var mixed = matmul(dropout(attention, dropout_p, dropout_rng), values);
  return dropout(proj.forward(tape, mixed), dropout_p, dropout_rng);
}

AttentionVars CausalSelfAttention::forward(Tape& tape, Var x, const AttentionOptions& options) {
  const std::size_t length = x.value().rows();
  if (options.final_row_keep && *options.final_row_keep >= length) {
    throw IndexError("final_row_keep " + std::to_string(*options.final_row_keep) + " outside sequence of length " +
                     std::to_string(length));
  }
  AttentionWeights w = weights(tape, x, options.query_offset);
  Var att = w.attention;
  if (options.final_row_keep) att = keep_only(att, att.value().rows() - 1, *options.final_row_keep);
  return {mix(tape, att, w.values, options.dropout_p, options.dropout_rng), att};
}

void CausalSelfAttention::collect(std::vector<Parameter*>& out) {
  query.collect(out);
  key.collect(out);
  value.collect(out);
  proj.collect(out);
}

AttentionResult causal_attention_forward(const Tensor& tokens, CausalSelfAttention& layer,
                                         std::optional<std::size_t> final_row_keep) {
  require_rank(tokens, 2, "attention tokens");
  Tape tape;
  AttentionOptions options;
  options.final_row_keep = final_row_keep;
  const AttentionVars vars = layer.forward(tape, tape.constant(tokens), options);
  return {vars.output.value(), vars.attention.value()};
}

}  // namespace ares::nn
