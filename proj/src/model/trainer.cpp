#include "ares/model/trainer.hpp"

#include <map>
#include <numeric>
#include <string>

#include "ares/core/error.hpp"

namespace ares::model {
namespace {

constexpr std::uint64_t kShuffleStream = 1;

}  // namespace

TrainReport train(AresModel& model, const data::Dataset& dataset, const EpochCallback& on_epoch) {
  if (dataset.episodes.empty()) throw ContractError("cannot train on an empty dataset");
  std::vector<TokenSequence> tokens;
  tokens.reserve(dataset.episodes.size());
  for (const auto& e : dataset.episodes) tokens.push_back(tokenize_episode(e, model.config().max_T));

  Rng shuffle(Rng::derive(model.config().seed, kShuffleStream));
  std::vector<std::size_t> order(tokens.size());
  TrainReport report;
  report.final_epoch_losses.assign(tokens.size(), 0.0);
  for (std::size_t epoch = 0; epoch < model.config().epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t i : order) {
      double loss = 0.0;
      try {
        loss = model.train_step(tokens[i], dataset.episodes[i].episode_return);
      } catch (const NumericError& err) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", episode " + std::to_string(i) +
                           ": " + err.what());
      }
      report.final_epoch_losses[i] = loss;
      total += loss;
    }
    const double mean = total / static_cast<double>(tokens.size());
    report.epoch_mean_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return report;
}

std::vector<data::ShapedSample> extract_all(AresModel& model, const data::Dataset& dataset) {
  std::vector<data::ShapedSample> samples;
  std::map<std::pair<data::Vec, data::Vec>, std::size_t> position;
  for (const auto& episode : dataset.episodes) {
    const TokenSequence tokens = tokenize_episode(episode, model.config().max_T);
    const std::vector<double> rewards = model.extract_all_timesteps(tokens);
    for (std::size_t t = 0; t < episode.length(); ++t) {
      auto key = std::make_pair(episode.states[t], episode.actions[t]);
      auto [it, inserted] = position.try_emplace(std::move(key), samples.size());
      if (inserted) {
        samples.push_back({episode.states[t], episode.actions[t], rewards[t]});
      } else {
        samples[it->second].reward = rewards[t];
      }
    }
  }
  return samples;
}

}  // namespace ares::model
