#include "ares/envs/cliffwalking.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ares/core/error.hpp"
#include "ares/core/format.hpp"

namespace ares::envs {

bool is_cliff(int state) {
  const int row = state / kCliffCols;
  const int col = state % kCliffCols;
  return row == kCliffRows - 1 && col >= 1 && col <= kCliffCols - 2;
}

int cliffwalking_m_reset() { return kCliffStart; }

CliffTransition cliffwalking_m_step(int state, int action) {
  if (state < 0 || state >= kCliffStates) throw ContractError("CliffWalking-m: invalid state " + std::to_string(state));
  if (action < 0 || action > 3) throw ContractError("CliffWalking-m: invalid action " + std::to_string(action));
  int row = state / kCliffCols;
  int col = state % kCliffCols;
  switch (action) {
    case kUp: row = std::max(row - 1, 0); break;
    case kRight: col = std::min(col + 1, kCliffCols - 1); break;
    case kDown: row = std::min(row + 1, kCliffRows - 1); break;
    default: col = std::max(col - 1, 0); break;
  }
  const int next = row * kCliffCols + col;
  if (is_cliff(next)) return {kCliffStart, kCliffFallReward, false};
  if (next == kCliffGoal) return {next, -1.0 + kCliffGoalBonus, true};
  return {next, -1.0, false};
}

CliffWalkingM::CliffWalkingM(std::size_t max_steps) {
  spec_.name = "CliffWalking-m";
  spec_.state_dim = 1;
  spec_.act_dim = 1;
  spec_.discrete_state = true;
  spec_.discrete_action = true;
  spec_.n_states = kCliffStates;
  spec_.n_actions = 4;
  spec_.max_steps = max_steps;
}

Vec CliffWalkingM::reset(std::uint64_t) {
  state_ = cliffwalking_m_reset();
  steps_ = 0;
  done_ = false;
  return {static_cast<double>(state_)};
}

StepResult CliffWalkingM::step(int action) {
  if (done_) throw StateError("CliffWalking-m: step called on a finished episode; call reset");
  check_action(spec_, action);
  const CliffTransition t = cliffwalking_m_step(state_, action);
  state_ = t.next_state;
  ++steps_;
  StepResult r;
  r.next_state = {static_cast<double>(state_)};
  r.reward = t.reward;
  r.terminated = t.terminated;
  r.truncated = !t.terminated && spec_.max_steps > 0 && steps_ >= spec_.max_steps;
  done_ = r.done();
  return r;
}

CliffOracle solve_cliffwalking_m(std::size_t max_iterations) {
  CliffOracle o;
  o.values.assign(kCliffStates, 0.0);
  o.policy.assign(kCliffStates, 0);
  auto backup = [&](int s, int a) {
    const CliffTransition t = cliffwalking_m_step(s, a);
    return t.reward + (t.terminated ? 0.0 : o.values[t.next_state]);
  };
  for (o.iterations = 1; o.iterations <= max_iterations; ++o.iterations) {
    std::vector<double> next = o.values;
    for (int s = 0; s < kCliffStates; ++s) {
      if (s == kCliffGoal || is_cliff(s)) continue;
      double best = backup(s, 0);
      for (int a = 1; a < 4; ++a) best = std::max(best, backup(s, a));
      next[s] = best;
    }
    const bool same = next == o.values;
    o.values = std::move(next);
    if (same) {
      o.converged = true;
      break;
    }
  }
  for (int s = 0; s < kCliffStates; ++s) {
    int arg = 0;
    for (int a = 1; a < 4; ++a) {
      if (backup(s, a) > backup(s, arg)) arg = a;
    }
    o.policy[s] = arg;
  }
  int s = kCliffStart;
  double total = 0.0;
  o.greedy_path.push_back(s);
  for (int i = 0; i < kCliffStates * 4; ++i) {
    const CliffTransition t = cliffwalking_m_step(s, o.policy[s]);
    total += t.reward;
    s = t.next_state;
    o.greedy_path.push_back(s);
    if (t.terminated) {
      o.reaches_goal = true;
      break;
    }
  }
  o.optimal_return = o.values[kCliffStart];
  if (o.reaches_goal && total != o.optimal_return) o.reaches_goal = false;
  return o;
}

std::optional<std::string> cliff_threshold_warning(double oracle_optimum) {
  if (oracle_optimum == kCliffReportedOptimum) return std::nullopt;
  std::ostringstream msg;
  msg << "CliffWalking-m optimal return from value iteration is " << format_double(oracle_optimum)
      << ", not the reported +" << format_double(kCliffReportedOptimum)
      << "; the oracle value is used as the solve threshold";
  return msg.str();
}

}  // namespace ares::envs
