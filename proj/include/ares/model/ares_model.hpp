#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "ares/core/rng.hpp"
#include "ares/model/config.hpp"
#include "ares/model/tokenize.hpp"
#include "ares/nn/adamw.hpp"
#include "ares/nn/layers.hpp"

namespace ares::model {

enum class Mode { train, eval };

// Single-block return-prediction transformer.
//
//   x   = embed(tokens) [+ positional encoding]
//   a   = causal self-attention(x)            (final query row only)
//   r   = x[T-1] + MLP(a[T-1])                MLP: h -> ff_ratio*h -> GELU -> h
//   g^  = Linear(token_dim -> 1)(Linear(h -> token_dim)(LN2(LN1(r))))
//
// Only the final position feeds the scalar head and every layer after the
// attention mixing is position-wise, so earlier query rows are never
// computed.
class AresModel {
 public:
  explicit AresModel(AresConfig config);

  const AresConfig& config() const { return config_; }

  std::vector<nn::Parameter*> parameters();
  std::vector<const nn::Parameter*> parameters() const;
  std::size_t parameter_count() const;

  // Records the forward pass on `tape` and returns the [1, 1] prediction.
  // `keep` (0-based) masks the final attention row to that single column.
  nn::Var forward(nn::Tape& tape, const TokenSequence& tokens, Mode mode,
                  std::optional<std::size_t> keep = std::nullopt);

  // Predicted episodic return. Train mode draws dropout masks from the
  // model's dropout stream; eval mode is deterministic.
  double predict_return(const TokenSequence& tokens, Mode mode);

  // Shaped reward for timestep t (0-based): eval-mode forward with the final
  // attention row zeroed outside column t.
  double extract_shaped_reward(const TokenSequence& tokens, std::size_t t);

  // Shaped rewards for every timestep of one sequence. Shares the embedding
  // and attention-weight computation across timesteps; each entry equals
  // extract_shaped_reward(tokens, t) exactly.
  std::vector<double> extract_all_timesteps(const TokenSequence& tokens);

  // One AdamW step on MSE(g^, target). Returns the loss before the update.
  double train_step(const TokenSequence& tokens, double target);

  nn::AdamW& optimizer() { return optimizer_; }
  const nn::AdamW& optimizer() const { return optimizer_; }
  Rng& dropout_rng() { return dropout_rng_; }

 private:
  struct Prefix {
    nn::Var x_last;     // [1, h] residual input at the final position
    nn::Var attention;  // [1, T] final attention row
    nn::Var values;     // [T, h]
  };

  Prefix forward_prefix(nn::Tape& tape, const TokenSequence& tokens, Rng* dropout);
  nn::Var forward_tail(nn::Tape& tape, const Prefix& prefix, nn::Var attention, Rng* dropout);
  void check_tokens(const TokenSequence& tokens) const;

  AresConfig config_;
  std::variant<nn::Linear, nn::DiscreteEmbedding> embedding_;
  nn::CausalSelfAttention attention_;
  nn::Linear mlp_in_;
  nn::Linear mlp_out_;
  nn::LayerNorm norm1_;
  nn::LayerNorm norm2_;
  nn::Linear head_token_;
  nn::Linear head_out_;
  nn::AdamW optimizer_;
  Rng dropout_rng_;
};

// Sinusoidal position table [length, dim].
nn::Tensor sinusoidal_positions(std::size_t length, std::size_t dim);

}  // namespace ares::model
