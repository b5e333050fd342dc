#include "ares/envs/environment.hpp"

#include "ares/core/error.hpp"
#include "ares/envs/cartpole.hpp"
#include "ares/envs/cliffwalking.hpp"

namespace ares::envs {

std::unique_ptr<Environment> make_env(const std::string& name) {
  if (name == "CliffWalking-m") return std::make_unique<CliffWalkingM>();
  if (name == "CartPole-v1") return std::make_unique<CartPole>();
  throw ConfigError("unknown environment '" + name + "' (expected CliffWalking-m or CartPole-v1)");
}

void check_action(const EnvSpec& spec, int action) {
  if (action < 0 || static_cast<std::size_t>(action) >= spec.n_actions) {
    throw ContractError(spec.name + ": invalid action " + std::to_string(action));
  }
}

}  // namespace ares::envs
