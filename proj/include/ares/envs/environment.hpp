#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ares::envs {

using Vec = std::vector<double>;

struct EnvSpec {
  std::string name;
  std::size_t state_dim = 0;
  std::size_t act_dim = 1;
  bool discrete_state = false;
  bool discrete_action = true;
  std::size_t n_states = 0;  // 0 when the state space is continuous
  std::size_t n_actions = 0;
  std::size_t max_steps = 0;
};

struct StepResult {
  Vec next_state;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;

  bool done() const { return terminated || truncated; }
};

// Raw environment with its original reward function.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual Vec reset(std::uint64_t seed) = 0;
  virtual StepResult step(int action) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

// What a learner sees: no access to the original reward once wrapped.
class AgentEnv {
 public:
  virtual ~AgentEnv() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual Vec reset(std::uint64_t seed) = 0;
  virtual StepResult step(int action) = 0;
};

// "CliffWalking-m" or "CartPole-v1".
std::unique_ptr<Environment> make_env(const std::string& name);

void check_action(const EnvSpec& spec, int action);

}  // namespace ares::envs
