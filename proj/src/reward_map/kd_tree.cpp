#include "ares/reward_map/kd_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "ares/core/error.hpp"

namespace ares::reward_map {
namespace {

constexpr std::size_t kLeafSize = 8;
// Lower bounds are shrunk by this factor before pruning so that rounding in
// the metric can never discard a true neighbor.
constexpr double kBoundSlack = 1.0 - 1e-12;

bool closer(const Neighbor& a, const Neighbor& b) {
  return std::tie(a.distance, a.index) < std::tie(b.distance, b.index);
}

}  // namespace

KdTree::KdTree(std::vector<double> points, std::size_t dim, SplitMetric metric)
    : points_(std::move(points)), dim_(dim), metric_(metric) {
  if (dim_ == 0) throw DimensionError("kd-tree needs positive dimension");
  if (points_.size() % dim_ != 0) throw DimensionError("kd-tree point buffer is not a multiple of dim");
  order_.resize(size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!order_.empty()) build(0, order_.size());
}

int KdTree::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  std::size_t best_dim = 0;
  double best_spread = -1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double lo = points_[order_[begin] * dim_ + d];
    double hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      const double v = points_[order_[i] * dim_ + d];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = d;
    }
  }
  if (best_spread <= 0.0) return id;  // all points coincide: keep as a leaf

  const std::size_t mid = begin + (end - begin) / 2;
  auto coord = [&](std::size_t idx) { return points_[idx * dim_ + best_dim]; };
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                     return std::make_pair(coord(a), a) < std::make_pair(coord(b), b);
                   });
  nodes_[id].split_dim = best_dim;
  nodes_[id].split_value = coord(order_[mid]);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::offer(std::size_t index, std::span<const double> query, std::size_t k, std::vector<Neighbor>& best) const {
  const Neighbor candidate{index, metric_(query, point(index))};
  if (best.size() == k && !closer(candidate, best.back())) return;
  auto pos = std::upper_bound(best.begin(), best.end(), candidate, closer);
  best.insert(pos, candidate);
  if (best.size() > k) best.pop_back();
}

void KdTree::search(int node_id, std::span<const double> query, std::size_t k, std::vector<Neighbor>& best) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.left < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) offer(order_[i], query, k, best);
    return;
  }
  const double diff = query[node.split_dim] - node.split_value;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  search(near, query, k, best);
  if (best.size() < k || std::abs(diff) * kBoundSlack <= best.back().distance) search(far, query, k, best);
}

std::vector<Neighbor> KdTree::nearest(std::span<const double> query, std::size_t k) const {
  if (query.size() != dim_) throw DimensionError("query dimension does not match kd-tree");
  std::vector<Neighbor> best;
  if (k == 0 || nodes_.empty()) return best;
  best.reserve(k + 1);
  search(0, query, k, best);
  return best;
}

}  // namespace ares::reward_map
