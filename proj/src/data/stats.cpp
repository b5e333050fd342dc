#include "ares/data/stats.hpp"

#include <algorithm>
#include <sstream>

#include "ares/core/format.hpp"

namespace ares::data {

DatasetStats dataset_stats(const Dataset& dataset) {
  DatasetStats s;
  if (dataset.episodes.empty()) return s;
  s.episodes = dataset.episodes.size();
  s.length_min = dataset.episodes.front().length();
  s.return_min = s.return_max = dataset.episodes.front().episode_return;
  double return_sum = 0.0;
  for (const Episode& ep : dataset.episodes) {
    s.total_steps += ep.length();
    s.length_min = std::min(s.length_min, ep.length());
    s.length_max = std::max(s.length_max, ep.length());
    s.return_min = std::min(s.return_min, ep.episode_return);
    s.return_max = std::max(s.return_max, ep.episode_return);
    return_sum += ep.episode_return;
  }
  const double n = static_cast<double>(s.episodes);
  s.length_mean = static_cast<double>(s.total_steps) / n;
  s.return_mean = return_sum / n;
  return s;
}

std::string describe(const DatasetStats& s) {
  std::ostringstream out;
  out << "episodes " << s.episodes << ", steps " << s.total_steps << "\n"
      << "length min/mean/max " << s.length_min << " / " << format_double(s.length_mean) << " / " << s.length_max << "\n"
      << "return min/mean/max " << format_double(s.return_min) << " / " << format_double(s.return_mean) << " / "
      << format_double(s.return_max) << "\n";
  return out.str();
}

}  // namespace ares::data
