#include "ares/agents/train.hpp"

#include <memory>

#include "ares/core/error.hpp"

namespace ares::agents {
namespace {

class Learner {
 public:
  virtual ~Learner() = default;
  virtual int act(const std::vector<double>& state) = 0;
  virtual void learn(const std::vector<double>& state, int action, const envs::StepResult& step) = 0;
  virtual void end_episode() {}
};

std::size_t state_index(const std::vector<double>& s) { return static_cast<std::size_t>(s.at(0)); }

class TabularLearner final : public Learner {
 public:
  TabularLearner(const envs::EnvSpec& spec, const QConfig& config, std::uint64_t seed)
      : table_(spec.n_states, spec.n_actions, config), rng_(Rng::derive(seed, 1)) {}

  int act(const std::vector<double>& state) override { return static_cast<int>(table_.act(state_index(state), rng_)); }

  void learn(const std::vector<double>& state, int action, const envs::StepResult& step) override {
    table_.update(state_index(state), static_cast<std::size_t>(action), step.reward, state_index(step.next_state),
                  step.terminated);
    if (table_.config().decay_unit == DecayUnit::step) table_.decay_epsilon();
  }

  void end_episode() override {
    if (table_.config().decay_unit == DecayUnit::episode) table_.decay_epsilon();
  }

 private:
  QTable table_;
  Rng rng_;
};

class DqnLearner final : public Learner {
 public:
  DqnLearner(const envs::EnvSpec& spec, const DqnConfig& config, std::uint64_t seed)
      : agent_(spec.state_dim, spec.n_actions, config, seed) {}

  int act(const std::vector<double>& state) override { return agent_.act(state); }

  void learn(const std::vector<double>& state, int action, const envs::StepResult& step) override {
    agent_.observe(Transition{state, action, step.reward, step.next_state, step.terminated});
  }

 private:
  DqnAgent agent_;
};

std::unique_ptr<Learner> make_learner(const envs::EnvSpec& spec, const AgentSettings& settings, std::uint64_t seed) {
  if (!spec.discrete_action) throw ConfigError(spec.name + " has continuous actions; no supported learner");
  if (settings.algorithm == Algorithm::tabular_q) {
    if (!spec.discrete_state) throw ConfigError("tabular Q-learning needs a discrete state space, " + spec.name + " has none");
    return std::make_unique<TabularLearner>(spec, settings.q, seed);
  }
  return std::make_unique<DqnLearner>(spec, settings.dqn, seed);
}

}  // namespace

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "tabular_q") return Algorithm::tabular_q;
  if (name == "dqn") return Algorithm::dqn;
  throw ConfigError("unknown algorithm '" + name + "' (expected tabular_q or dqn)");
}

std::string algorithm_name(Algorithm a) { return a == Algorithm::tabular_q ? "tabular_q" : "dqn"; }

TrialResult train_agent(envs::RewardWrapper& env, const AgentSettings& settings, const TrainOptions& options,
                        std::uint64_t seed) {
  if (options.success.repeat == 0) throw ConfigError("success repeat count must be at least 1");
  envs::AgentEnv& learner_env = env;
  auto learner = make_learner(learner_env.spec(), settings, seed);
  TrialResult result;
  std::size_t successes = 0;
  for (std::size_t ep = 0; ep < options.max_episodes; ++ep) {
    EpisodeTrace trace;
    std::vector<double> state = learner_env.reset(Rng::derive(seed, 1000 + ep));
    for (;;) {
      const int action = learner->act(state);
      const envs::StepResult step = learner_env.step(action);
      learner->learn(state, action, step);
      if (options.on_episode) {
        trace.states.push_back(state);
        trace.actions.push_back(action);
      }
      state = step.next_state;
      if (step.done()) break;
    }
    learner->end_episode();
    const double eval = env.evaluation_return();
    result.eval_returns.push_back(eval);
    if (eval >= options.success.threshold && ++successes == options.success.repeat) result.solved_at = ep + 1;
    bool stop = options.stop_on_solve && result.solved_at.has_value();
    if (options.on_episode) {
      trace.eval_rewards = env.evaluation_rewards();
      trace.eval_return = eval;
      stop = options.on_episode(trace) || stop;
    }
    if (stop) break;
  }
  return result;
}

}  // namespace ares::agents
