#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ares/envs/environment.hpp"
#include "ares/reward_map/reward_map.hpp"

namespace ares::envs {

// Base for reward-transforming wrappers. The original reward is kept in an
// evaluation channel that is only reachable through the concrete wrapper,
// never through the AgentEnv interface handed to learners.
class RewardWrapper : public AgentEnv {
 public:
  explicit RewardWrapper(std::unique_ptr<Environment> env);

  const EnvSpec& spec() const override { return env_->spec(); }
  Vec reset(std::uint64_t seed) override;
  StepResult step(int action) override;

  double evaluation_return() const { return eval_return_; }
  const std::vector<double>& evaluation_rewards() const { return eval_rewards_; }

 protected:
  // Maps one transition of the raw env to the reward the learner receives.
  virtual double transform(const Vec& state, int action, const StepResult& raw) = 0;
  virtual void on_reset() {}

 private:
  std::unique_ptr<Environment> env_;
  Vec state_;
  double eval_return_ = 0.0;
  std::vector<double> eval_rewards_;
};

class ImmediateReward final : public RewardWrapper {
 public:
  using RewardWrapper::RewardWrapper;

 protected:
  double transform(const Vec&, int, const StepResult& raw) override { return raw.reward; }
};

// Zero every step; the episode's summed reward on the final step.
class DelayedReward final : public RewardWrapper {
 public:
  using RewardWrapper::RewardWrapper;

 protected:
  double transform(const Vec& state, int action, const StepResult& raw) override;
  void on_reset() override { total_ = 0.0; }

 private:
  double total_ = 0.0;
};

// Every step's reward is the map lookup for (s_t, a_t).
class ShapedReward final : public RewardWrapper {
 public:
  ShapedReward(std::unique_ptr<Environment> env, std::shared_ptr<const reward_map::ShapedRewardMap> map);

 protected:
  double transform(const Vec& state, int action, const StepResult& raw) override;

 private:
  std::shared_ptr<const reward_map::ShapedRewardMap> map_;
};

}  // namespace ares::envs
