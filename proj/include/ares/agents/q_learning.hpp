#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ares/core/rng.hpp"

namespace ares::agents {

enum class DecayUnit { step, episode };

struct QConfig {
  double epsilon = 0.9;
  double epsilon_decay = 0.99;
  double lr = 0.99;
  double gamma = 0.99;
  DecayUnit decay_unit = DecayUnit::step;

  void validate() const;
};

class QTable {
 public:
  QTable(std::size_t n_states, std::size_t n_actions, QConfig config = {});

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  double epsilon() const { return epsilon_; }
  const QConfig& config() const { return config_; }

  double q(std::size_t s, std::size_t a) const { return values_[s * n_actions_ + a]; }
  std::span<const double> row(std::size_t s) const;
  const std::vector<double>& values() const { return values_; }

  // Q(s,a) += lr * (r + gamma * max Q(s') * (1 - terminated) - Q(s,a))
  void update(std::size_t s, std::size_t a, double r, std::size_t next, bool terminated);
  std::size_t act(std::size_t s, Rng& rng) const;
  void decay_epsilon() { epsilon_ *= config_.epsilon_decay; }

 private:
  void check_state(std::size_t s) const;

  std::size_t n_states_;
  std::size_t n_actions_;
  QConfig config_;
  double epsilon_;
  std::vector<double> values_;
};

void q_update(QTable& table, std::size_t s, std::size_t a, double r, std::size_t next, bool terminated);

// Uniform random action with probability epsilon, otherwise the argmax with
// the lowest index winning ties.
std::size_t epsilon_greedy_action(std::span<const double> values, double epsilon, Rng& rng);

std::size_t argmax(std::span<const double> values);

}  // namespace ares::agents
