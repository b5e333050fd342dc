#include <cmath>
#include <fstream>
#include <sstream>

#include "ares/core/error.hpp"
#include "ares/core/format.hpp"
#include "ares/harness/experiment.hpp"

namespace ares::harness {
namespace {

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& want) {
  throw ConfigError("setting '" + key + "': '" + value + "' is not " + want);
}

double to_double(const std::string& key, const std::string& v) {
  const auto d = parse_double(v);
  if (!d || !std::isfinite(*d)) bad(key, v, "a number");
  return *d;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) bad(key, v, "a non-negative integer");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    bad(key, v, "a 64-bit integer");
  }
}

std::size_t to_size(const std::string& key, const std::string& v) { return static_cast<std::size_t>(to_u64(key, v)); }

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v, "a boolean");
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<std::size_t> to_sizes(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& s : to_list(v)) out.push_back(to_size(key, s));
  return out;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

template <typename T>
std::string join(const std::vector<T>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, std::string>) {
      out += items[i];
    } else {
      out += std::to_string(items[i]);
    }
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string condition_name(Condition c) {
  switch (c) {
    case Condition::immediate: return "immediate";
    case Condition::delayed: return "delayed";
    case Condition::shaped_random: return "shaped_random";
    case Condition::shaped_expert: return "shaped_expert";
  }
  return "unknown";
}

Condition condition_from_name(const std::string& name) {
  for (Condition c : kAllConditions) {
    if (condition_name(c) == name) return c;
  }
  throw ConfigError("unknown condition '" + name + "' (expected immediate, delayed, shaped_random or shaped_expert)");
}

ExperimentConfig ExperimentConfig::defaults(const std::string& env) {
  ExperimentConfig c;
  c.env = env;
  if (env == "CliffWalking-m") {
    c.agent.algorithm = agents::Algorithm::tabular_q;
    c.agent.q.decay_unit = agents::DecayUnit::episode;
    c.episodes = 200;
    c.random_episodes = 100;
    c.expert_cap = 200;
    c.ares.discrete_embedding = true;
    c.ares.epochs_random = 500;
    c.ares.epochs_expert = 500;
  } else if (env == "CartPole-v1") {
    c.agent.algorithm = agents::Algorithm::dqn;
    c.episodes = 500;
    c.random_episodes = 200;
    c.expert_cap = 500;
    c.ares.epochs_random = 1000;
    c.ares.epochs_expert = 1000;
    c.map.normalize = true;
  } else {
    throw ConfigError("unknown environment '" + env + "' (expected CliffWalking-m or CartPole-v1)");
  }
  return c;
}

bool ExperimentConfig::has(Condition c) const {
  for (Condition x : conditions) {
    if (x == c) return true;
  }
  return false;
}

void ExperimentConfig::validate() const {
  if (trials == 0) throw ConfigError("trials must be at least 1");
  if (conditions.empty()) throw ConfigError("at least one condition must be enabled");
  for (std::size_t i = 1; i < cutoffs.size(); ++i) {
    if (cutoffs[i] <= cutoffs[i - 1]) throw ConfigError("cutoffs must be strictly increasing");
  }
  if (success_repeat == 0) throw ConfigError("success_repeat must be at least 1");
  if (threads == 0) throw ConfigError("threads must be at least 1");
  if (random_episodes == 0) throw ConfigError("random_episodes must be at least 1");
  if (expert_cap == 0) throw ConfigError("expert_cap must be at least 1");
  if (run_id.empty() || run_id.find_first_of(",\n\r") != std::string::npos) {
    throw ConfigError("run_id must be non-empty and free of commas and newlines");
  }
  if (ares.h_dim == 0 || ares.ff_ratio == 0 || ares.max_T == 0) throw ConfigError("ares sizes must be positive");
  if (!(ares.lr >= 0.0)) throw ConfigError("ares.lr must be non-negative");
  if (!(ares.dropout >= 0.0 && ares.dropout < 1.0)) throw ConfigError("ares.dropout must lie in [0, 1)");
  if (!(map.merge_epsilon >= 0.0)) throw ConfigError("map.merge_epsilon must be non-negative");
  map.distance.validate();
  agent.q.validate();
  agent.dqn.validate();
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& v) {
  if (key == "run_id") c.run_id = v;
  else if (key == "env") c.env = v;
  else if (key == "algorithm") c.agent.algorithm = agents::algorithm_from_name(v);
  else if (key == "trials") c.trials = to_size(key, v);
  else if (key == "conditions") {
    c.conditions.clear();
    for (const auto& name : to_list(v)) c.conditions.push_back(condition_from_name(name));
  }
  else if (key == "seed") c.seed = to_u64(key, v);
  else if (key == "episodes") c.episodes = to_size(key, v);
  else if (key == "cutoffs") c.cutoffs = to_sizes(key, v);
  else if (key == "stop_on_solve") c.stop_on_solve = to_bool(key, v);
  else if (key == "success_repeat") c.success_repeat = to_size(key, v);
  else if (key == "threads") c.threads = to_size(key, v);
  else if (key == "resume") c.resume = to_bool(key, v);
  else if (key == "random_episodes") c.random_episodes = to_size(key, v);
  else if (key == "random_dataset") c.random_dataset = v;
  else if (key == "expert_dataset") c.expert_dataset = v;
  else if (key == "expert_cap") c.expert_cap = to_size(key, v);
  else if (key == "expert_retries") c.expert_retries = to_size(key, v);
  else if (key == "ares.h_dim") c.ares.h_dim = to_size(key, v);
  else if (key == "ares.lr") c.ares.lr = to_double(key, v);
  else if (key == "ares.weight_decay") c.ares.weight_decay = to_double(key, v);
  else if (key == "ares.dropout") c.ares.dropout = to_double(key, v);
  else if (key == "ares.ff_ratio") c.ares.ff_ratio = to_size(key, v);
  else if (key == "ares.max_T") c.ares.max_T = to_size(key, v);
  else if (key == "ares.epochs_random") c.ares.epochs_random = to_size(key, v);
  else if (key == "ares.epochs_expert") c.ares.epochs_expert = to_size(key, v);
  else if (key == "ares.epochs") c.ares.epochs_random = c.ares.epochs_expert = to_size(key, v);
  else if (key == "ares.positional_encoding") c.ares.positional_encoding = to_bool(key, v);
  else if (key == "ares.discrete_embedding") c.ares.discrete_embedding = to_bool(key, v);
  else if (key == "map.preset") c.map.distance = reward_map::DistanceConfig::preset(v);
  else if (key == "map.k") c.map.distance.k_neighbors = to_size(key, v);
  else if (key == "map.p_state") c.map.distance.p_state = static_cast<int>(to_size(key, v));
  else if (key == "map.p_action") c.map.distance.p_action = static_cast<int>(to_size(key, v));
  else if (key == "map.rounding") c.map.distance.rounding = reward_map::rounding_from_int(static_cast<int>(to_size(key, v)));
  else if (key == "map.aggregation") {
    if (v == "mean") c.map.distance.aggregation = reward_map::Aggregation::mean;
    else if (v == "inverse_distance") c.map.distance.aggregation = reward_map::Aggregation::inverse_distance;
    else bad(key, v, "mean or inverse_distance");
  }
  else if (key == "map.normalize") c.map.normalize = to_bool(key, v);
  else if (key == "map.merge_epsilon") c.map.merge_epsilon = to_double(key, v);
  else if (key == "q.epsilon") c.agent.q.epsilon = to_double(key, v);
  else if (key == "q.epsilon_decay") c.agent.q.epsilon_decay = to_double(key, v);
  else if (key == "q.lr") c.agent.q.lr = to_double(key, v);
  else if (key == "q.gamma") c.agent.q.gamma = to_double(key, v);
  else if (key == "q.decay_unit") {
    if (v == "step") c.agent.q.decay_unit = agents::DecayUnit::step;
    else if (v == "episode") c.agent.q.decay_unit = agents::DecayUnit::episode;
    else bad(key, v, "step or episode");
  }
  else if (key == "dqn.eps_start") c.agent.dqn.eps_start = to_double(key, v);
  else if (key == "dqn.eps_end") c.agent.dqn.eps_end = to_double(key, v);
  else if (key == "dqn.eps_decay") c.agent.dqn.eps_decay = to_double(key, v);
  else if (key == "dqn.eps_multiplier") c.agent.dqn.eps_multiplier = to_double(key, v);
  else if (key == "dqn.schedule") {
    if (v == "exponential") c.agent.dqn.schedule = agents::EpsilonSchedule::exponential;
    else if (v == "multiplicative") c.agent.dqn.schedule = agents::EpsilonSchedule::multiplicative;
    else bad(key, v, "exponential or multiplicative");
  }
  else if (key == "dqn.gamma") c.agent.dqn.gamma = to_double(key, v);
  else if (key == "dqn.lr") c.agent.dqn.lr = to_double(key, v);
  else if (key == "dqn.weight_decay") c.agent.dqn.weight_decay = to_double(key, v);
  else if (key == "dqn.batch") c.agent.dqn.batch = to_size(key, v);
  else if (key == "dqn.buffer") c.agent.dqn.buffer = to_size(key, v);
  else if (key == "dqn.tau") c.agent.dqn.tau = to_double(key, v);
  else if (key == "dqn.hidden") c.agent.dqn.hidden = to_sizes(key, v);
  else if (key == "dqn.huber") c.agent.dqn.huber = to_bool(key, v);
  else if (key == "dqn.grad_clip") c.agent.dqn.grad_clip = to_double(key, v);
  else throw ConfigError("unknown setting '" + key + "'");
}

Settings settings_of(const ExperimentConfig& c) {
  const auto& d = c.map.distance;
  const auto& q = c.agent.q;
  const auto& n = c.agent.dqn;
  std::vector<std::string> conds;
  for (Condition x : c.conditions) conds.push_back(condition_name(x));
  return {
      {"run_id", c.run_id},
      {"env", c.env},
      {"algorithm", agents::algorithm_name(c.agent.algorithm)},
      {"trials", std::to_string(c.trials)},
      {"conditions", join(conds)},
      {"seed", std::to_string(c.seed)},
      {"episodes", std::to_string(c.episodes)},
      {"cutoffs", join(c.cutoffs)},
      {"stop_on_solve", bool_text(c.stop_on_solve)},
      {"success_repeat", std::to_string(c.success_repeat)},
      {"threads", std::to_string(c.threads)},
      {"resume", bool_text(c.resume)},
      {"random_episodes", std::to_string(c.random_episodes)},
      {"random_dataset", c.random_dataset},
      {"expert_dataset", c.expert_dataset},
      {"expert_cap", std::to_string(c.expert_cap)},
      {"expert_retries", std::to_string(c.expert_retries)},
      {"ares.h_dim", std::to_string(c.ares.h_dim)},
      {"ares.lr", format_double(c.ares.lr)},
      {"ares.weight_decay", format_double(c.ares.weight_decay)},
      {"ares.dropout", format_double(c.ares.dropout)},
      {"ares.ff_ratio", std::to_string(c.ares.ff_ratio)},
      {"ares.max_T", std::to_string(c.ares.max_T)},
      {"ares.epochs_random", std::to_string(c.ares.epochs_random)},
      {"ares.epochs_expert", std::to_string(c.ares.epochs_expert)},
      {"ares.positional_encoding", bool_text(c.ares.positional_encoding)},
      {"ares.discrete_embedding", bool_text(c.ares.discrete_embedding)},
      {"map.k", std::to_string(d.k_neighbors)},
      {"map.p_state", std::to_string(d.p_state)},
      {"map.p_action", std::to_string(d.p_action)},
      {"map.rounding", std::to_string(static_cast<int>(d.rounding))},
      {"map.aggregation", d.aggregation == reward_map::Aggregation::mean ? "mean" : "inverse_distance"},
      {"map.normalize", bool_text(c.map.normalize)},
      {"map.merge_epsilon", format_double(c.map.merge_epsilon)},
      {"q.epsilon", format_double(q.epsilon)},
      {"q.epsilon_decay", format_double(q.epsilon_decay)},
      {"q.lr", format_double(q.lr)},
      {"q.gamma", format_double(q.gamma)},
      {"q.decay_unit", q.decay_unit == agents::DecayUnit::step ? "step" : "episode"},
      {"dqn.eps_start", format_double(n.eps_start)},
      {"dqn.eps_end", format_double(n.eps_end)},
      {"dqn.eps_decay", format_double(n.eps_decay)},
      {"dqn.eps_multiplier", format_double(n.eps_multiplier)},
      {"dqn.schedule", n.schedule == agents::EpsilonSchedule::exponential ? "exponential" : "multiplicative"},
      {"dqn.gamma", format_double(n.gamma)},
      {"dqn.lr", format_double(n.lr)},
      {"dqn.weight_decay", format_double(n.weight_decay)},
      {"dqn.batch", std::to_string(n.batch)},
      {"dqn.buffer", std::to_string(n.buffer)},
      {"dqn.tau", format_double(n.tau)},
      {"dqn.hidden", join(n.hidden)},
      {"dqn.huber", bool_text(n.huber)},
      {"dqn.grad_clip", format_double(n.grad_clip)},
  };
}

Settings read_settings(std::istream& in) {
  Settings out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

Settings read_settings_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return read_settings(in);
}

ExperimentConfig resolve_config(const Settings& file, const Settings& overrides) {
  std::string env = "CliffWalking-m";
  for (const auto* list : {&file, &overrides}) {
    for (const auto& [k, v] : *list) {
      if (k == "env") env = v;
    }
  }
  ExperimentConfig c = ExperimentConfig::defaults(env);
  for (const auto* list : {&file, &overrides}) {
    for (const auto& [k, v] : *list) apply_setting(c, k, v);
  }
  c.validate();
  return c;
}

void write_config(const ExperimentConfig& config, std::ostream& out) {
  for (const auto& [k, v] : settings_of(config)) out << k << " = " << v << '\n';
}

}  // namespace ares::harness
