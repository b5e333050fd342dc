#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ares/core/rng.hpp"
#include "ares/nn/tensor.hpp"

namespace ares::nn {

// A trainable tensor plus its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

  void zero_grad() { grad.fill(0.0); }
};

class Tape;

// Handle to a node recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so walking the
// tape backwards from the loss visits every node after all of its consumers.
class Tape {
 public:
  // Receives the node's own output value and its accumulated gradient.
  using Backprop = std::function<void(Tape&, const Tensor& out_value, const Tensor& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  // Leaf whose gradient is added into p.grad on backward(). The parameter
  // value is referenced, not copied, and must outlive the tape.
  Var parameter(Parameter& p);
  Var record(Tensor value, Backprop backprop);

  // Populates gradients for every parameter reachable from `loss`, which
  // must be a single-element node. A tape can be backpropagated once.
  void backward(Var loss);

  const Tensor& value(std::size_t id) const;
  // Gradient buffer of a node, allocated (zero) on first use.
  Tensor& grad(std::size_t id);
  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  struct Node {
    Tensor owned;
    const Tensor* borrowed = nullptr;
    Tensor grad;
    Backprop backprop;
    Parameter* param = nullptr;
  };
  std::vector<Node> nodes_;
  bool consumed_ = false;
};

// Differentiable operations. All arguments must live on the same tape.
Var matmul(Var a, Var b);
Var matmul_nt(Var a, Var b);
Var add(Var a, Var b);
Var add_bias(Var x, Var bias);
Var scale(Var x, double factor);
Var gelu(Var x);
Var relu(Var x);
Var layer_norm(Var x, Var gain, Var shift, double eps);

// Scaled causal softmax over score rows. Row r is the query at absolute
// position `query_offset + r` and may attend to key columns 0..query_offset+r.
Var causal_softmax(Var scores, double scale, std::size_t query_offset);

// Zeroes every entry of `row` except column `col`; the kept entry is copied
// unchanged (no renormalization).
Var keep_only(Var attention, std::size_t row, std::size_t col);

// Inverted dropout. Identity when `rng` is null or p == 0.
Var dropout(Var x, double p, Rng* rng);

Var select_row(Var x, std::size_t row);
Var slice_rows(Var x, std::size_t begin);

// Rows of `table` picked by `indices`, stacked: [indices.size(), table.cols()].
Var gather_rows(Var table, std::span<const std::size_t> indices);
// One entry per row of x ([B, A]) at column columns[b]: returns [B, 1].
Var pick_columns(Var x, std::span<const std::size_t> columns);

// (pred - target)^2 for a single-element pred.
Var mse(Var pred, double target);
// Mean over rows of (pred - target)^2, or of the Huber loss with delta 1.
Var mean_squared_error(Var pred, std::span<const double> targets);
Var mean_huber(Var pred, std::span<const double> targets);

}  // namespace ares::nn
