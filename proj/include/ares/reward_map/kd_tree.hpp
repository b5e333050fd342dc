#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ares/reward_map/distance.hpp"

namespace ares::reward_map {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Exact k-nearest-neighbor index. Results are ordered by (distance, point
// index), so equidistant points resolve by insertion order and agree with a
// sorted linear scan.
class KdTree {
 public:
  KdTree() = default;
  KdTree(std::vector<double> points, std::size_t dim, SplitMetric metric);

  std::size_t size() const { return dim_ ? points_.size() / dim_ : 0; }
  std::size_t dim() const { return dim_; }
  std::span<const double> point(std::size_t i) const {
    return std::span<const double>(points_).subspan(i * dim_, dim_);
  }

  std::vector<Neighbor> nearest(std::span<const double> query, std::size_t k) const;

 private:
  struct Node {
    std::size_t begin = 0;  // range into order_
    std::size_t end = 0;
    std::size_t split_dim = 0;
    double split_value = 0.0;
    int left = -1;
    int right = -1;
  };

  int build(std::size_t begin, std::size_t end);
  void search(int node, std::span<const double> query, std::size_t k, std::vector<Neighbor>& best) const;
  void offer(std::size_t index, std::span<const double> query, std::size_t k, std::vector<Neighbor>& best) const;

  std::vector<double> points_;
  std::size_t dim_ = 0;
  SplitMetric metric_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace ares::reward_map
