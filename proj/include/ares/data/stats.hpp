#pragma once

#include <cstddef>
#include <string>

#include "ares/data/episode.hpp"

namespace ares::data {

struct DatasetStats {
  std::size_t episodes = 0;
  std::size_t total_steps = 0;
  std::size_t length_min = 0;
  double length_mean = 0.0;
  std::size_t length_max = 0;
  double return_min = 0.0;
  double return_mean = 0.0;
  double return_max = 0.0;
};

// All fields stay zero for an empty dataset.
DatasetStats dataset_stats(const Dataset& dataset);

std::string describe(const DatasetStats& stats);

}  // namespace ares::data
