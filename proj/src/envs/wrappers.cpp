#include "ares/envs/wrappers.hpp"

#include "ares/core/error.hpp"

namespace ares::envs {

RewardWrapper::RewardWrapper(std::unique_ptr<Environment> env) : env_(std::move(env)) {
  if (!env_) throw ContractError("reward wrapper needs an environment");
}

Vec RewardWrapper::reset(std::uint64_t seed) {
  state_ = env_->reset(seed);
  eval_return_ = 0.0;
  eval_rewards_.clear();
  on_reset();
  return state_;
}

StepResult RewardWrapper::step(int action) {
  StepResult raw = env_->step(action);
  eval_return_ += raw.reward;
  eval_rewards_.push_back(raw.reward);
  const double shaped = transform(state_, action, raw);
  state_ = raw.next_state;
  raw.reward = shaped;
  return raw;
}

double DelayedReward::transform(const Vec&, int, const StepResult& raw) {
  total_ += raw.reward;
  return raw.done() ? total_ : 0.0;
}

ShapedReward::ShapedReward(std::unique_ptr<Environment> env, std::shared_ptr<const reward_map::ShapedRewardMap> map)
    : RewardWrapper(std::move(env)), map_(std::move(map)) {
  if (!map_) throw ContractError("shaped reward wrapper needs a reward map");
  if (map_->state_dim() != spec().state_dim || map_->act_dim() != spec().act_dim) {
    throw DimensionError("reward map is " + std::to_string(map_->state_dim()) + "+" + std::to_string(map_->act_dim()) +
                         " dimensional but " + spec().name + " needs " + std::to_string(spec().state_dim) + "+" +
                         std::to_string(spec().act_dim));
  }
}

double ShapedReward::transform(const Vec& state, int action, const StepResult&) {
  const double a = static_cast<double>(action);
  return map_->lookup(state, std::span<const double>(&a, 1));
}

}  // namespace ares::envs
