#include "ares/model/config.hpp"

#include <string>

#include "ares/core/error.hpp"

namespace ares::model {

void AresConfig::validate() const {
  if (token_dim == 0) throw ConfigError("token_dim must be positive");
  if (h_dim == 0) throw ConfigError("h_dim must be positive");
  if (n_blocks != 1) throw ConfigError("only a single transformer block is supported");
  if (n_heads != 1) throw ConfigError("only single-head attention is supported");
  if (dropout_p < 0.0 || dropout_p >= 1.0) throw ConfigError("dropout_p must be in [0, 1)");
  if (ff_ratio == 0) throw ConfigError("ff_ratio must be positive");
  if (max_T == 0) throw ConfigError("max_T must be positive");
  if (!discrete_vocab.empty() && discrete_vocab.size() != token_dim) {
    throw ConfigError("discrete_vocab needs one entry per token column (" + std::to_string(token_dim) + ")");
  }
  for (std::size_t v : discrete_vocab) {
    if (v == 0) throw ConfigError("discrete_vocab entries must be positive");
  }
  if (!(optimizer.lr >= 0.0)) throw ConfigError("learning rate must be non-negative");
  if (epochs == 0) throw ConfigError("epochs must be positive");
}

}  // namespace ares::model
