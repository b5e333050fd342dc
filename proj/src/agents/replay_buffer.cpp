#include "ares/agents/replay_buffer.hpp"

#include <algorithm>

#include "ares/core/error.hpp"

namespace ares::agents {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (batch == 0) throw ContractError("sample batch must be positive");
  if (items_.size() < batch) {
    throw StateError("replay buffer holds " + std::to_string(items_.size()) + " transitions, batch needs " +
                     std::to_string(batch));
  }
  // Floyd's algorithm: distinct indices in O(batch) draws.
  const std::size_t n = items_.size();
  std::vector<std::size_t> chosen;
  chosen.reserve(batch);
  for (std::size_t j = n - batch; j < n; ++j) {
    const std::size_t t = rng.index(j + 1);
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(j);
    }
  }
  return chosen;
}

}  // namespace ares::agents
