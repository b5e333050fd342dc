#include "ares/envs/cartpole.hpp"

#include <cmath>

#include "ares/core/error.hpp"
#include "ares/core/rng.hpp"

namespace ares::envs {

using namespace cartpole;

CartPoleState cartpole_reset(std::uint64_t seed) {
  Rng rng(seed);
  CartPoleState s{};
  for (double& v : s) v = rng.uniform(-kResetBound, kResetBound);
  return s;
}

CartPoleState cartpole_dynamics(const CartPoleState& s, int action) {
  if (action != 0 && action != 1) throw ContractError("CartPole-v1: invalid action " + std::to_string(action));
  const auto [x, x_dot, theta, theta_dot] = s;
  const double force = action == 1 ? kForceMag : -kForceMag;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double temp = (force + kPoleMassLength * theta_dot * theta_dot * sin_t) / kTotalMass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) / (kHalfLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / kTotalMass));
  const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;
  return {x + kTau * x_dot, x_dot + kTau * x_acc, theta + kTau * theta_dot, theta_dot + kTau * theta_acc};
}

bool cartpole_failed(const CartPoleState& s) {
  return s[0] < -kXThreshold || s[0] > kXThreshold || s[2] < -kThetaThreshold || s[2] > kThetaThreshold;
}

CartPole::CartPole(std::size_t max_steps) {
  spec_.name = "CartPole-v1";
  spec_.state_dim = 4;
  spec_.act_dim = 1;
  spec_.discrete_state = false;
  spec_.discrete_action = true;
  spec_.n_states = 0;
  spec_.n_actions = 2;
  spec_.max_steps = max_steps;
}

Vec CartPole::reset(std::uint64_t seed) {
  state_ = cartpole_reset(seed);
  steps_ = 0;
  done_ = false;
  return Vec(state_.begin(), state_.end());
}

StepResult CartPole::step(int action) {
  if (done_) throw StateError("CartPole-v1: step called on a finished episode; call reset");
  check_action(spec_, action);
  state_ = cartpole_dynamics(state_, action);
  ++steps_;
  StepResult r;
  r.next_state.assign(state_.begin(), state_.end());
  r.reward = 1.0;
  r.terminated = cartpole_failed(state_);
  r.truncated = !r.terminated && steps_ >= spec_.max_steps;
  done_ = r.done();
  return r;
}

}  // namespace ares::envs
