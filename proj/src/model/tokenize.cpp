#include "ares/model/tokenize.hpp"

#include <string>

#include "ares/core/error.hpp"

namespace ares::model {

TokenSequence tokenize_episode(const data::Episode& episode, std::size_t max_T) {
  const std::size_t length = episode.length();
  if (length == 0) throw LengthError("cannot tokenize an empty episode");
  if (length > max_T) {
    throw LengthError("episode of length " + std::to_string(length) + " exceeds max_T " + std::to_string(max_T));
  }
  if (episode.actions.size() != length) throw ContractError("episode states and actions differ in length");
  const std::size_t dim = episode.states[0].size() + episode.actions[0].size();
  std::vector<double> data;
  data.reserve(length * dim);
  for (std::size_t t = 0; t < length; ++t) {
    if (episode.states[t].size() + episode.actions[t].size() != dim) {
      throw DimensionError("step " + std::to_string(t) + " has a different state/action width");
    }
    data.insert(data.end(), episode.states[t].begin(), episode.states[t].end());
    data.insert(data.end(), episode.actions[t].begin(), episode.actions[t].end());
  }
  return TokenSequence{nn::Tensor({length, dim}, std::move(data))};
}

}  // namespace ares::model
