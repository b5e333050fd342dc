#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ares/agents/replay_buffer.hpp"
#include "ares/core/rng.hpp"
#include "ares/nn/adamw.hpp"
#include "ares/nn/layers.hpp"

namespace ares::agents {

enum class EpsilonSchedule { exponential, multiplicative };

struct DqnConfig {
  double eps_start = 0.9;
  double eps_end = 0.01;
  double eps_decay = 1000.0;        // exponential time constant, in action selections
  double eps_multiplier = 0.999;    // per action selection, multiplicative schedule
  EpsilonSchedule schedule = EpsilonSchedule::exponential;
  double gamma = 0.99;
  double lr = 1e-4;
  double weight_decay = 0.01;
  std::size_t batch = 128;
  std::size_t buffer = 10000;
  double tau = 0.005;
  std::vector<std::size_t> hidden{128, 128};
  bool huber = false;
  double grad_clip = 100.0;  // elementwise gradient clamp; 0 disables

  void validate() const;
};

double dqn_epsilon(const DqnConfig& config, std::uint64_t steps);

// Fully connected ReLU network mapping a state batch [B, state_dim] to
// action values [B, n_actions].
class DqnNet {
 public:
  DqnNet() = default;
  DqnNet(std::size_t state_dim, std::size_t n_actions, const std::vector<std::size_t>& hidden, Rng& rng);

  nn::Var forward(nn::Tape& tape, const nn::Tensor& states);
  nn::Tensor predict(const nn::Tensor& states) const;

  std::vector<nn::Parameter*> parameters();
  std::vector<const nn::Parameter*> parameters() const;
  std::size_t n_actions() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }

 private:
  std::vector<nn::Linear> layers_;
};

nn::Tensor stack_states(const std::vector<const std::vector<double>*>& rows);

// One optimizer step on a uniform minibatch. Returns nullopt (and touches
// nothing) while the buffer holds fewer than config.batch transitions.
std::optional<double> dqn_train_step(DqnNet& net, const DqnNet& target, const ReplayBuffer& buffer,
                                     const DqnConfig& config, nn::AdamW& optimizer, Rng& rng);

// target <- tau * online + (1 - tau) * target
void soft_update(DqnNet& target, const DqnNet& online, double tau);

class DqnAgent {
 public:
  DqnAgent(std::size_t state_dim, std::size_t n_actions, DqnConfig config, std::uint64_t seed);

  // Epsilon-greedy; advances the exploration schedule.
  int act(const std::vector<double>& state);
  int greedy(const std::vector<double>& state) const;
  // Stores the transition, runs one train step, then soft-updates the target.
  std::optional<double> observe(Transition t);

  double epsilon() const { return dqn_epsilon(config_, steps_); }
  std::uint64_t steps() const { return steps_; }
  const DqnNet& online() const { return net_; }
  const DqnNet& target() const { return target_; }
  const DqnConfig& config() const { return config_; }

 private:
  DqnConfig config_;
  Rng rng_;
  DqnNet net_;
  DqnNet target_;
  nn::AdamW optimizer_;
  ReplayBuffer buffer_;
  std::uint64_t steps_ = 0;
};

}  // namespace ares::agents
