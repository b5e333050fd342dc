#include "ares/agents/q_learning.hpp"

#include <algorithm>

#include "ares/core/error.hpp"

namespace ares::agents {

void QConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(epsilon_decay >= 0.0 && epsilon_decay <= 1.0)) throw ConfigError("epsilon decay must lie in [0, 1]");
  if (!(lr >= 0.0 && lr <= 1.0)) throw ConfigError("Q learning rate must lie in [0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
}

QTable::QTable(std::size_t n_states, std::size_t n_actions, QConfig config)
    : n_states_(n_states), n_actions_(n_actions), config_(config), epsilon_(config.epsilon) {
  config_.validate();
  if (n_states == 0 || n_actions == 0) throw ConfigError("Q table needs at least one state and one action");
  values_.assign(n_states * n_actions, 0.0);
}

void QTable::check_state(std::size_t s) const {
  if (s >= n_states_) throw IndexError("state " + std::to_string(s) + " outside Q table of " + std::to_string(n_states_));
}

std::span<const double> QTable::row(std::size_t s) const {
  check_state(s);
  return std::span<const double>(values_).subspan(s * n_actions_, n_actions_);
}

void QTable::update(std::size_t s, std::size_t a, double r, std::size_t next, bool terminated) {
  check_state(s);
  check_state(next);
  if (a >= n_actions_) throw IndexError("action " + std::to_string(a) + " outside Q table");
  const auto next_row = row(next);
  const double bootstrap = terminated ? 0.0 : *std::max_element(next_row.begin(), next_row.end());
  double& q = values_[s * n_actions_ + a];
  q += config_.lr * (r + config_.gamma * bootstrap - q);
}

std::size_t QTable::act(std::size_t s, Rng& rng) const { return epsilon_greedy_action(row(s), epsilon_, rng); }

void q_update(QTable& table, std::size_t s, std::size_t a, double r, std::size_t next, bool terminated) {
  table.update(s, a, r, next, terminated);
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw ContractError("argmax of an empty set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::size_t epsilon_greedy_action(std::span<const double> values, double epsilon, Rng& rng) {
  if (values.empty()) throw ContractError("no actions to choose from");
  if (rng.uniform() < epsilon) return rng.index(values.size());
  return argmax(values);
}

}  // namespace ares::agents
