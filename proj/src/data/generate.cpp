#include "ares/data/generate.hpp"

#include "ares/core/error.hpp"
#include "ares/core/format.hpp"
#include "ares/core/rng.hpp"
#include "ares/envs/wrappers.hpp"

namespace ares::data {
namespace {

DatasetInfo info_for(const envs::EnvSpec& spec, const std::string& policy, std::uint64_t seed) {
  DatasetInfo info;
  info.env = spec.name;
  info.policy = policy;
  info.seed = seed;
  info.state_dim = spec.state_dim;
  info.act_dim = spec.act_dim;
  return info;
}

}  // namespace

std::optional<double> default_random_filter(const std::string& env_name) {
  if (env_name == "CliffWalking-m") return -2000.0;
  return std::nullopt;
}

Dataset generate_random_dataset(const envs::Environment& prototype, const RandomDatasetOptions& options) {
  if (options.n_episodes == 0) throw ContractError("random dataset needs at least one episode");
  auto env = prototype.clone();
  const envs::EnvSpec& spec = env->spec();
  Dataset d;
  d.info = info_for(spec, "random", options.seed);
  d.info.params["n_episodes"] = std::to_string(options.n_episodes);
  if (options.reject_at_or_below) d.info.params["reject_at_or_below"] = format_double(*options.reject_at_or_below);

  Rng policy(Rng::derive(options.seed, 0));
  std::uint64_t attempt = 0;
  std::size_t rejected_in_a_row = 0;
  std::size_t rejected = 0;
  while (d.episodes.size() < options.n_episodes) {
    Episode ep;
    ep.rewards.emplace();
    std::vector<double> state = env->reset(Rng::derive(options.seed, 1 + attempt++));
    for (;;) {
      const int action = static_cast<int>(policy.index(spec.n_actions));
      const envs::StepResult step = env->step(action);
      ep.states.push_back(state);
      ep.actions.push_back({static_cast<double>(action)});
      ep.rewards->push_back(step.reward);
      state = step.next_state;
      if (step.done()) break;
    }
    ep.episode_return = sum_rewards(*ep.rewards);
    if (options.reject_at_or_below && ep.episode_return <= *options.reject_at_or_below) {
      ++rejected;
      if (++rejected_in_a_row >= options.max_consecutive_rejections) {
        throw ContractError("random dataset filter rejected " + std::to_string(rejected_in_a_row) +
                            " consecutive episodes; giving up");
      }
      continue;
    }
    rejected_in_a_row = 0;
    d.episodes.push_back(std::move(ep));
  }
  d.info.params["rejected"] = std::to_string(rejected);
  return d;
}

Dataset generate_trainingexpert_dataset(const envs::Environment& prototype, const ExpertDatasetOptions& options) {
  if (options.episode_cap == 0) throw ContractError("expert dataset cap must be positive");
  for (std::size_t attempt = 0; attempt <= options.retry_limit; ++attempt) {
    const std::uint64_t run_seed = Rng::derive(options.seed, attempt);
    envs::ImmediateReward env(prototype.clone());
    Dataset d;
    d.info = info_for(env.spec(), "trainingexpert", options.seed);
    d.info.params["algorithm"] = agents::algorithm_name(options.agent.algorithm);
    d.info.params["optimal_return"] = format_double(options.optimal_return);
    d.info.params["episode_cap"] = std::to_string(options.episode_cap);
    d.info.params["attempt"] = std::to_string(attempt);
    bool optimal = false;
    agents::TrainOptions train;
    train.max_episodes = options.episode_cap;
    train.success.threshold = options.optimal_return;
    train.on_episode = [&](const agents::EpisodeTrace& trace) {
      Episode ep;
      ep.states = trace.states;
      for (int a : trace.actions) ep.actions.push_back({static_cast<double>(a)});
      ep.rewards = trace.eval_rewards;
      ep.episode_return = trace.eval_return;
      d.episodes.push_back(std::move(ep));
      optimal = trace.eval_return >= options.optimal_return;
      return optimal;
    };
    agents::train_agent(env, options.agent, train, run_seed);
    if (optimal) return d;
  }
  throw ContractError("no optimal episode within " + std::to_string(options.episode_cap) + " episodes after " +
                      std::to_string(options.retry_limit + 1) + " attempts");
}

}  // namespace ares::data
