#pragma once

#include <cstddef>

#include "ares/data/episode.hpp"
#include "ares/nn/tensor.hpp"

namespace ares::model {

// Transformer input: one row per timestep, the state vector followed by the
// action vector.
struct TokenSequence {
  nn::Tensor tokens;  // [T, state_dim + act_dim]

  std::size_t length() const { return tokens.rows(); }
  std::size_t token_dim() const { return tokens.cols(); }
};

// Throws LengthError for an empty episode or one longer than max_T.
TokenSequence tokenize_episode(const data::Episode& episode, std::size_t max_T);

}  // namespace ares::model
