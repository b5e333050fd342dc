#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ares/envs/environment.hpp"

namespace ares::envs {

inline constexpr int kCliffRows = 4;
inline constexpr int kCliffCols = 12;
inline constexpr int kCliffStates = kCliffRows * kCliffCols;
inline constexpr int kCliffStart = 36;
inline constexpr int kCliffGoal = 47;
inline constexpr double kCliffGoalBonus = 100.0;
inline constexpr double kCliffFallReward = -100.0;
inline constexpr std::size_t kCliffMaxSteps = 1000;
inline constexpr double kCliffReportedOptimum = 88.0;

enum CliffAction : int { kUp = 0, kRight = 1, kDown = 2, kLeft = 3 };

struct CliffTransition {
  int next_state = kCliffStart;
  double reward = 0.0;
  bool terminated = false;
};

int cliffwalking_m_reset();
// Pure transition function; throws ContractError on a bad state or action.
CliffTransition cliffwalking_m_step(int state, int action);
bool is_cliff(int state);

class CliffWalkingM final : public Environment {
 public:
  explicit CliffWalkingM(std::size_t max_steps = kCliffMaxSteps);

  const EnvSpec& spec() const override { return spec_; }
  Vec reset(std::uint64_t seed) override;
  StepResult step(int action) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<CliffWalkingM>(*this); }

  int state() const { return state_; }

 private:
  EnvSpec spec_;
  int state_ = kCliffStart;
  std::size_t steps_ = 0;
  bool done_ = true;
};

struct CliffOracle {
  std::vector<double> values;  // optimal undiscounted value per state
  std::vector<int> policy;     // greedy action per state, lowest index on ties
  double optimal_return = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<int> greedy_path;  // states visited by the greedy rollout from start
  bool reaches_goal = false;
};

// Undiscounted value iteration over the deterministic dynamics.
CliffOracle solve_cliffwalking_m(std::size_t max_iterations = 10000);

// Warning text when the oracle optimum differs from the commonly reported
// threshold of +88, otherwise nullopt.
std::optional<std::string> cliff_threshold_warning(double oracle_optimum);

}  // namespace ares::envs
