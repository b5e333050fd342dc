#include "ares/model/ares_model.hpp"

#include <cmath>
#include <string>

#include "ares/core/error.hpp"

namespace ares::model {
namespace {

enum Stream : std::uint64_t { kInitStream = 0, kDropoutStream = 2 };

nn::Var checked(nn::Var v, const char* layer) {
  if (!v.value().all_finite()) throw NumericError(std::string("non-finite activation after ") + layer);
  return v;
}

}  // namespace

nn::Tensor sinusoidal_positions(std::size_t length, std::size_t dim) {
  nn::Tensor table({length, dim});
  for (std::size_t pos = 0; pos < length; ++pos) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(dim));
      const double angle = static_cast<double>(pos) * freq;
      table(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return table;
}

AresModel::AresModel(AresConfig config)
    : config_(std::move(config)),
      optimizer_(config_.optimizer),
      dropout_rng_(Rng::derive(config_.seed, kDropoutStream)) {
  config_.validate();
  Rng init(Rng::derive(config_.seed, kInitStream));
  const std::size_t h = config_.h_dim;
  const std::size_t tok = config_.token_dim;
  if (config_.discrete_vocab.empty()) {
    embedding_ = nn::Linear("embed", tok, h, init);
  } else {
    embedding_ = nn::DiscreteEmbedding("embed", config_.discrete_vocab, h, init);
  }
  attention_ = nn::CausalSelfAttention("block.attn", h, init);
  mlp_in_ = nn::Linear("block.mlp_in", h, config_.ff_ratio * h, init);
  mlp_out_ = nn::Linear("block.mlp_out", config_.ff_ratio * h, h, init);
  norm1_ = nn::LayerNorm("block.ln1", h);
  norm2_ = nn::LayerNorm("block.ln2", h);
  norm1_.eps = config_.layer_norm_eps;
  norm2_.eps = config_.layer_norm_eps;
  head_token_ = nn::Linear("head.token", h, tok, init);
  head_out_ = nn::Linear("head.out", tok, 1, init);
}

std::vector<nn::Parameter*> AresModel::parameters() {
  std::vector<nn::Parameter*> out;
  std::visit([&](auto& e) { e.collect(out); }, embedding_);
  attention_.collect(out);
  mlp_in_.collect(out);
  mlp_out_.collect(out);
  norm1_.collect(out);
  norm2_.collect(out);
  head_token_.collect(out);
  head_out_.collect(out);
  return out;
}

std::vector<const nn::Parameter*> AresModel::parameters() const {
  auto mut = const_cast<AresModel*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

std::size_t AresModel::parameter_count() const {
  std::size_t n = 0;
  for (const nn::Parameter* p : parameters()) n += p->value.size();
  return n;
}

void AresModel::check_tokens(const TokenSequence& tokens) const {
  if (tokens.length() == 0) throw LengthError("empty token sequence");
  if (tokens.length() > config_.max_T) {
    throw LengthError("sequence of length " + std::to_string(tokens.length()) + " exceeds max_T " +
                      std::to_string(config_.max_T));
  }
  if (tokens.token_dim() != config_.token_dim) {
    throw DimensionError("token width " + std::to_string(tokens.token_dim()) + " does not match model token_dim " +
                         std::to_string(config_.token_dim));
  }
}

AresModel::Prefix AresModel::forward_prefix(nn::Tape& tape, const TokenSequence& tokens, Rng* dropout) {
  check_tokens(tokens);
  const std::size_t length = tokens.length();
  nn::Var x = std::visit(
      [&](auto& e) -> nn::Var {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, nn::Linear>) {
          return e.forward(tape, tape.constant(tokens.tokens));
        } else {
          return e.forward(tape, tokens.tokens);
        }
      },
      embedding_);
  if (config_.positional_encoding) x = nn::add(x, tape.constant(sinusoidal_positions(length, config_.h_dim)));
  x = checked(nn::dropout(x, config_.dropout_p, dropout), "embedding");

  const nn::AttentionWeights w = attention_.weights(tape, x, length - 1);
  return Prefix{nn::select_row(x, length - 1), checked(w.attention, "attention weights"), w.values};
}

nn::Var AresModel::forward_tail(nn::Tape& tape, const Prefix& prefix, nn::Var attention, Rng* dropout) {
  const double p = config_.dropout_p;
  nn::Var attn_out = checked(attention_.mix(tape, attention, prefix.values, p, dropout), "attention");
  nn::Var hidden = nn::gelu(mlp_in_.forward(tape, attn_out));
  nn::Var mlp = checked(nn::dropout(mlp_out_.forward(tape, hidden), p, dropout), "mlp");
  nn::Var residual = nn::add(prefix.x_last, mlp);
  nn::Var normed = checked(norm2_.forward(tape, norm1_.forward(tape, residual)), "layer norm");
  return checked(head_out_.forward(tape, head_token_.forward(tape, normed)), "head");
}

nn::Var AresModel::forward(nn::Tape& tape, const TokenSequence& tokens, Mode mode, std::optional<std::size_t> keep) {
  if (keep && *keep >= tokens.length()) {
    throw IndexError("timestep " + std::to_string(*keep) + " outside sequence of length " +
                     std::to_string(tokens.length()));
  }
  Rng* dropout = mode == Mode::train ? &dropout_rng_ : nullptr;
  const Prefix prefix = forward_prefix(tape, tokens, dropout);
  nn::Var att = keep ? nn::keep_only(prefix.attention, 0, *keep) : prefix.attention;
  return forward_tail(tape, prefix, att, dropout);
}

double AresModel::predict_return(const TokenSequence& tokens, Mode mode) {
  nn::Tape tape;
  return forward(tape, tokens, mode).value().item();
}

double AresModel::extract_shaped_reward(const TokenSequence& tokens, std::size_t t) {
  if (t >= tokens.length()) {
    throw IndexError("timestep " + std::to_string(t) + " outside sequence of length " +
                     std::to_string(tokens.length()));
  }
  nn::Tape tape;
  return forward(tape, tokens, Mode::eval, t).value().item();
}

std::vector<double> AresModel::extract_all_timesteps(const TokenSequence& tokens) {
  nn::Tape tape;
  const Prefix prefix = forward_prefix(tape, tokens, nullptr);
  std::vector<double> rewards(tokens.length());
  for (std::size_t t = 0; t < tokens.length(); ++t) {
    rewards[t] = forward_tail(tape, prefix, nn::keep_only(prefix.attention, 0, t), nullptr).value().item();
  }
  return rewards;
}

double AresModel::train_step(const TokenSequence& tokens, double target) {
  auto params = parameters();
  nn::zero_grad(params);
  nn::Tape tape;
  nn::Var loss = nn::mse(forward(tape, tokens, Mode::train), target);
  const double value = loss.value().item();
  if (!std::isfinite(value)) throw NumericError("non-finite loss");
  tape.backward(loss);
  optimizer_.step(params);
  return value;
}

}  // namespace ares::model
