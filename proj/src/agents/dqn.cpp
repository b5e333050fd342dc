#include "ares/agents/dqn.hpp"

#include <algorithm>
#include <cmath>

#include "ares/core/error.hpp"
#include "ares/nn/ops.hpp"

namespace ares::agents {

void DqnConfig::validate() const {
  if (!(eps_start >= 0.0 && eps_start <= 1.0) || !(eps_end >= 0.0 && eps_end <= eps_start)) {
    throw ConfigError("DQN epsilon bounds must satisfy 0 <= eps_end <= eps_start <= 1");
  }
  if (!(eps_decay > 0.0)) throw ConfigError("DQN eps_decay must be positive");
  if (!(eps_multiplier > 0.0 && eps_multiplier <= 1.0)) throw ConfigError("DQN eps_multiplier must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("DQN gamma must lie in [0, 1]");
  if (!(lr >= 0.0)) throw ConfigError("DQN lr must be non-negative");
  if (batch == 0 || buffer < batch) throw ConfigError("DQN buffer must hold at least one batch");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("DQN tau must lie in [0, 1]");
  if (hidden.empty()) throw ConfigError("DQN needs at least one hidden layer");
  if (!(grad_clip >= 0.0)) throw ConfigError("DQN grad_clip must be non-negative");
}

double dqn_epsilon(const DqnConfig& config, std::uint64_t steps) {
  const double n = static_cast<double>(steps);
  if (config.schedule == EpsilonSchedule::exponential) {
    return config.eps_end + (config.eps_start - config.eps_end) * std::exp(-n / config.eps_decay);
  }
  return std::max(config.eps_end, config.eps_start * std::pow(config.eps_multiplier, n));
}

DqnNet::DqnNet(std::size_t state_dim, std::size_t n_actions, const std::vector<std::size_t>& hidden, Rng& rng) {
  std::size_t in = state_dim;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    layers_.emplace_back("fc" + std::to_string(i), in, hidden[i], rng);
    in = hidden[i];
  }
  layers_.emplace_back("out", in, n_actions, rng);
}

nn::Var DqnNet::forward(nn::Tape& tape, const nn::Tensor& states) {
  nn::Var x = tape.constant(states);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i].forward(tape, x);
    if (i + 1 < layers_.size()) x = nn::relu(x);
  }
  return x;
}

nn::Tensor DqnNet::predict(const nn::Tensor& states) const {
  nn::Tensor x = states;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = nn::linear_forward(x, layers_[i].weight.value, layers_[i].bias.value);
    if (i + 1 < layers_.size()) x = nn::relu(x);
  }
  return x;
}

std::vector<nn::Parameter*> DqnNet::parameters() {
  std::vector<nn::Parameter*> out;
  for (auto& l : layers_) l.collect(out);
  return out;
}

std::vector<const nn::Parameter*> DqnNet::parameters() const {
  std::vector<const nn::Parameter*> out;
  for (const auto& l : layers_) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

nn::Tensor stack_states(const std::vector<const std::vector<double>*>& rows) {
  if (rows.empty()) throw ContractError("no states to stack");
  const std::size_t dim = rows.front()->size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (const auto* r : rows) {
    if (r->size() != dim) throw DimensionError("state batch has ragged rows");
    flat.insert(flat.end(), r->begin(), r->end());
  }
  return nn::Tensor({rows.size(), dim}, std::move(flat));
}

std::optional<double> dqn_train_step(DqnNet& net, const DqnNet& target, const ReplayBuffer& buffer,
                                     const DqnConfig& config, nn::AdamW& optimizer, Rng& rng) {
  if (buffer.size() < config.batch) return std::nullopt;
  const auto picks = buffer.sample(config.batch, rng);
  std::vector<const std::vector<double>*> states;
  std::vector<const std::vector<double>*> next_states;
  std::vector<std::size_t> actions;
  for (std::size_t i : picks) {
    states.push_back(&buffer[i].state);
    next_states.push_back(&buffer[i].next_state);
    actions.push_back(static_cast<std::size_t>(buffer[i].action));
  }
  const nn::Tensor next_q = target.predict(stack_states(next_states));
  std::vector<double> targets(picks.size());
  for (std::size_t b = 0; b < picks.size(); ++b) {
    const Transition& t = buffer[picks[b]];
    double best = next_q(b, 0);
    for (std::size_t a = 1; a < next_q.cols(); ++a) best = std::max(best, next_q(b, a));
    targets[b] = t.reward + (t.done ? 0.0 : config.gamma * best);
  }

  auto params = net.parameters();
  nn::zero_grad(params);
  nn::Tape tape;
  nn::Var q = nn::pick_columns(net.forward(tape, stack_states(states)), actions);
  nn::Var loss = config.huber ? nn::mean_huber(q, targets) : nn::mean_squared_error(q, targets);
  const double value = loss.value().item();
  if (!std::isfinite(value)) {
    throw NumericError("DQN loss is not finite at train step " + std::to_string(optimizer.state().step_count + 1));
  }
  tape.backward(loss);
  if (config.grad_clip > 0.0) {
    for (auto* p : params) {
      for (double& g : p->grad.data()) g = std::clamp(g, -config.grad_clip, config.grad_clip);
    }
  }
  optimizer.step(params);
  return value;
}

void soft_update(DqnNet& target, const DqnNet& online, double tau) {
  auto dst = target.parameters();
  const auto src = online.parameters();
  if (dst.size() != src.size()) throw DimensionError("soft update between networks of different depth");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (dst[i]->value.shape() != src[i]->value.shape()) {
      throw DimensionError("soft update shape mismatch at " + dst[i]->name + ": " +
                           nn::shape_string(dst[i]->value.shape()) + " vs " + nn::shape_string(src[i]->value.shape()));
    }
    auto d = dst[i]->value.data();
    const auto s = src[i]->value.data();
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = tau * s[k] + (1.0 - tau) * d[k];
  }
}

DqnAgent::DqnAgent(std::size_t state_dim, std::size_t n_actions, DqnConfig config, std::uint64_t seed)
    : config_(std::move(config)), rng_(Rng::derive(seed, 1)), buffer_(config_.buffer) {
  config_.validate();
  Rng init(Rng::derive(seed, 0));
  net_ = DqnNet(state_dim, n_actions, config_.hidden, init);
  target_ = net_;
  nn::AdamWConfig opt;
  opt.lr = config_.lr;
  opt.weight_decay = config_.weight_decay;
  opt.amsgrad = true;
  optimizer_ = nn::AdamW(opt);
}

int DqnAgent::greedy(const std::vector<double>& state) const {
  const nn::Tensor q = net_.predict(nn::Tensor({1, state.size()}, state));
  std::size_t best = 0;
  for (std::size_t a = 1; a < q.cols(); ++a) {
    if (q(0, a) > q(0, best)) best = a;
  }
  return static_cast<int>(best);
}

int DqnAgent::act(const std::vector<double>& state) {
  const double eps = dqn_epsilon(config_, steps_);
  ++steps_;
  if (rng_.uniform() < eps) return static_cast<int>(rng_.index(net_.n_actions()));
  return greedy(state);
}

std::optional<double> DqnAgent::observe(Transition t) {
  buffer_.push(std::move(t));
  auto loss = dqn_train_step(net_, target_, buffer_, config_, optimizer_, rng_);
  soft_update(target_, net_, config_.tau);
  return loss;
}

}  // namespace ares::agents
