#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ares/data/episode.hpp"
#include "ares/model/ares_model.hpp"

namespace ares::model {

struct TrainReport {
  std::vector<double> epoch_mean_loss;
  // Loss of each episode (dataset order) during the last epoch.
  std::vector<double> final_epoch_losses;
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

// config().epochs passes over the dataset. Each pass visits the episodes in
// an order shuffled from the model seed and takes one AdamW step per
// episode on MSE(g^, g).
TrainReport train(AresModel& model, const data::Dataset& dataset, const EpochCallback& on_epoch = {});

// Shaped reward for every timestep of every episode, keyed by the raw
// state-action pair. A repeated key keeps its first position and takes the
// most recent value.
std::vector<data::ShapedSample> extract_all(AresModel& model, const data::Dataset& dataset);

}  // namespace ares::model
