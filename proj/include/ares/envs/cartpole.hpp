#pragma once

#include <array>
#include <cstddef>

#include "ares/envs/environment.hpp"

namespace ares::envs {

namespace cartpole {
inline constexpr double kGravity = 9.8;
inline constexpr double kMassCart = 1.0;
inline constexpr double kMassPole = 0.1;
inline constexpr double kTotalMass = kMassCart + kMassPole;
inline constexpr double kHalfLength = 0.5;
inline constexpr double kPoleMassLength = kMassPole * kHalfLength;
inline constexpr double kForceMag = 10.0;
inline constexpr double kTau = 0.02;
inline constexpr double kThetaThreshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
inline constexpr double kXThreshold = 2.4;
inline constexpr double kResetBound = 0.05;
inline constexpr std::size_t kMaxSteps = 500;
}  // namespace cartpole

// (x, x_dot, theta, theta_dot)
using CartPoleState = std::array<double, 4>;

CartPoleState cartpole_reset(std::uint64_t seed);
// One explicit Euler step; throws ContractError unless action is 0 or 1.
CartPoleState cartpole_dynamics(const CartPoleState& s, int action);
bool cartpole_failed(const CartPoleState& s);

class CartPole final : public Environment {
 public:
  explicit CartPole(std::size_t max_steps = cartpole::kMaxSteps);

  const EnvSpec& spec() const override { return spec_; }
  Vec reset(std::uint64_t seed) override;
  StepResult step(int action) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<CartPole>(*this); }

  const CartPoleState& state() const { return state_; }
  void set_state(const CartPoleState& s) { state_ = s; }

 private:
  EnvSpec spec_;
  CartPoleState state_{};
  std::size_t steps_ = 0;
  bool done_ = true;
};

}  // namespace ares::envs
