#include "ares/nn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ares/core/error.hpp"
#include "ares/nn/ops.hpp"

namespace ares::nn {
namespace {

void add_into(Tensor& dst, const Tensor& src) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

Tape& same_tape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) throw StateError("operands recorded on different tapes");
  return *a.tape;
}

Tape& tape_of(Var a) {
  if (a.tape == nullptr) throw StateError("variable is not attached to a tape");
  return *a.tape;
}

}  // namespace

const Tensor& Var::value() const { return tape_of(*this).value(id); }

Var Tape::constant(Tensor value) { return record(std::move(value), nullptr); }

Var Tape::parameter(Parameter& p) {
  Node node;
  node.borrowed = &p.value;
  node.param = &p;
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, Backprop backprop) {
  Node node;
  node.owned = std::move(value);
  node.backprop = std::move(backprop);
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

const Tensor& Tape::value(std::size_t id) const {
  const Node& n = nodes_.at(id);
  return n.borrowed ? *n.borrowed : n.owned;
}

Tensor& Tape::grad(std::size_t id) {
  Node& n = nodes_.at(id);
  if (n.grad.empty()) n.grad = Tensor(value(id).shape());
  return n.grad;
}

void Tape::clear() {
  nodes_.clear();
  consumed_ = false;
}

void Tape::backward(Var loss) {
  if (loss.tape != this || nodes_.empty() || loss.id >= nodes_.size()) {
    throw StateError("backward called without a recorded forward pass");
  }
  if (consumed_) throw StateError("backward already ran on this tape; record a new forward pass");
  if (value(loss.id).size() != 1) throw DimensionError("backward needs a single-element loss");
  consumed_ = true;
  grad(loss.id).fill(1.0);
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty()) continue;
    if (n.backprop) n.backprop(*this, value(i), n.grad);
    if (n.param != nullptr) {
      if (n.param->grad.shape() != n.param->value.shape()) n.param->grad = Tensor(n.param->value.shape());
      add_into(n.param->grad, n.grad);
    }
  }
}

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b);
  return t.record(nn::matmul(a.value(), b.value()), [a, b](Tape& tp, const Tensor&, const Tensor& g) {
    add_into(tp.grad(a.id), matmul_nt(g, tp.value(b.id)));
    add_into(tp.grad(b.id), matmul_tn(tp.value(a.id), g));
  });
}

Var matmul_nt(Var a, Var b) {
  Tape& t = same_tape(a, b);
  return t.record(nn::matmul_nt(a.value(), b.value()), [a, b](Tape& tp, const Tensor&, const Tensor& g) {
    add_into(tp.grad(a.id), nn::matmul(g, tp.value(b.id)));
    add_into(tp.grad(b.id), matmul_tn(g, tp.value(a.id)));
  });
}

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b);
  if (a.value().shape() != b.value().shape()) {
    throw DimensionError("add: shapes " + shape_string(a.value().shape()) + " and " +
                         shape_string(b.value().shape()));
  }
  Tensor out = a.value();
  add_into(out, b.value());
  return t.record(std::move(out), [a, b](Tape& tp, const Tensor&, const Tensor& g) {
    add_into(tp.grad(a.id), g);
    add_into(tp.grad(b.id), g);
  });
}

Var add_bias(Var x, Var bias) {
  Tape& t = same_tape(x, bias);
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  require_rank(xv, 2, "add_bias input");
  require_rank(bv, 1, "add_bias bias");
  if (bv.size() != xv.cols()) throw DimensionError("add_bias: bias length does not match columns");
  Tensor out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bv[c];
  }
  return t.record(std::move(out), [x, bias](Tape& tp, const Tensor&, const Tensor& g) {
    add_into(tp.grad(x.id), g);
    Tensor& gb = tp.grad(bias.id);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) gb[c] += g(r, c);
    }
  });
}

Var scale(Var x, double factor) {
  Tape& t = tape_of(x);
  Tensor out = x.value();
  for (double& v : out.data()) v *= factor;
  return t.record(std::move(out), [x, factor](Tape& tp, const Tensor&, const Tensor& g) {
    Tensor& gx = tp.grad(x.id);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += factor * g[i];
  });
}

Var gelu(Var x) {
  Tape& t = tape_of(x);
  return t.record(nn::gelu(x.value()), [x](Tape& tp, const Tensor&, const Tensor& g) {
    const Tensor& xv = tp.value(x.id);
    Tensor& gx = tp.grad(x.id);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * gelu_derivative(xv[i]);
  });
}

Var relu(Var x) {
  Tape& t = tape_of(x);
  return t.record(nn::relu(x.value()), [x](Tape& tp, const Tensor&, const Tensor& g) {
    const Tensor& xv = tp.value(x.id);
    Tensor& gx = tp.grad(x.id);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (xv[i] > 0.0) gx[i] += g[i];
    }
  });
}

Var layer_norm(Var x, Var gain, Var shift, double eps) {
  Tape& t = same_tape(x, gain);
  same_tape(x, shift);
  return t.record(nn::layer_norm(x.value(), gain.value(), shift.value(), eps),
                  [x, gain, shift, eps](Tape& tp, const Tensor&, const Tensor& g) {
                    const Tensor& xv = tp.value(x.id);
                    const Tensor& gv = tp.value(gain.id);
                    Tensor& gx = tp.grad(x.id);
                    Tensor& ggain = tp.grad(gain.id);
                    Tensor& gshift = tp.grad(shift.id);
                    const std::size_t d = xv.cols();
                    const double inv_d = 1.0 / static_cast<double>(d);
                    std::vector<double> xhat(d), dxhat(d);
                    for (std::size_t r = 0; r < xv.rows(); ++r) {
                      double mean = 0.0;
                      for (std::size_t c = 0; c < d; ++c) mean += xv(r, c);
                      mean *= inv_d;
                      double var = 0.0;
                      for (std::size_t c = 0; c < d; ++c) var += (xv(r, c) - mean) * (xv(r, c) - mean);
                      var *= inv_d;
                      const double rstd = 1.0 / std::sqrt(var + eps);
                      double mean_dxhat = 0.0;
                      double mean_dxhat_xhat = 0.0;
                      for (std::size_t c = 0; c < d; ++c) {
                        xhat[c] = (xv(r, c) - mean) * rstd;
                        dxhat[c] = g(r, c) * gv[c];
                        ggain[c] += g(r, c) * xhat[c];
                        gshift[c] += g(r, c);
                        mean_dxhat += dxhat[c];
                        mean_dxhat_xhat += dxhat[c] * xhat[c];
                      }
                      mean_dxhat *= inv_d;
                      mean_dxhat_xhat *= inv_d;
                      for (std::size_t c = 0; c < d; ++c) {
                        gx(r, c) += rstd * (dxhat[c] - mean_dxhat - xhat[c] * mean_dxhat_xhat);
                      }
                    }
                  });
}

Var causal_softmax(Var scores, double scale, std::size_t query_offset) {
  Tape& t = tape_of(scores);
  const Tensor& s = scores.value();
  require_rank(s, 2, "causal_softmax scores");
  const std::size_t rows = s.rows();
  const std::size_t cols = s.cols();
  if (query_offset + rows > cols) {
    throw DimensionError("causal_softmax: " + std::to_string(rows) + " query rows at offset " +
                         std::to_string(query_offset) + " exceed " + std::to_string(cols) + " keys");
  }
  Tensor out(s.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t visible = query_offset + r + 1;
    double hi = s(r, 0) * scale;
    for (std::size_t c = 1; c < visible; ++c) hi = std::max(hi, s(r, c) * scale);
    double total = 0.0;
    for (std::size_t c = 0; c < visible; ++c) {
      out(r, c) = std::exp(s(r, c) * scale - hi);
      total += out(r, c);
    }
    for (std::size_t c = 0; c < visible; ++c) out(r, c) /= total;
  }
  return t.record(std::move(out), [scores, scale, query_offset](Tape& tp, const Tensor& a, const Tensor& g) {
    Tensor& gs = tp.grad(scores.id);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      const std::size_t visible = query_offset + r + 1;
      double dot = 0.0;
      for (std::size_t c = 0; c < visible; ++c) dot += a(r, c) * g(r, c);
      for (std::size_t c = 0; c < visible; ++c) gs(r, c) += scale * a(r, c) * (g(r, c) - dot);
    }
  });
}

Var keep_only(Var attention, std::size_t row, std::size_t col) {
  Tape& t = tape_of(attention);
  const Tensor& a = attention.value();
  require_rank(a, 2, "keep_only attention");
  if (row >= a.rows() || col >= a.cols()) {
    throw IndexError("keep_only: (" + std::to_string(row) + ", " + std::to_string(col) + ") outside " +
                     shape_string(a.shape()));
  }
  Tensor out = a;
  for (std::size_t c = 0; c < out.cols(); ++c) {
    if (c != col) out(row, c) = 0.0;
  }
  return t.record(std::move(out), [attention, row, col](Tape& tp, const Tensor&, const Tensor& g) {
    Tensor& ga = tp.grad(attention.id);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) {
        if (r != row || c == col) ga(r, c) += g(r, c);
      }
    }
  });
}

Var dropout(Var x, double p, Rng* rng) {
  if (rng == nullptr || p <= 0.0) return x;
  if (p >= 1.0) throw ContractError("dropout probability must be below 1");
  Tape& t = tape_of(x);
  const double keep_scale = 1.0 / (1.0 - p);
  Tensor mask(x.value().shape());
  for (double& m : mask.data()) m = rng->bernoulli(p) ? 0.0 : keep_scale;
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return t.record(std::move(out), [x, mask = std::move(mask)](Tape& tp, const Tensor&, const Tensor& g) {
    Tensor& gx = tp.grad(x.id);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * mask[i];
  });
}

Var select_row(Var x, std::size_t row) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  require_rank(xv, 2, "select_row input");
  if (row >= xv.rows()) throw IndexError("select_row: row " + std::to_string(row) + " of " + shape_string(xv.shape()));
  const auto r = xv.row(row);
  return t.record(Tensor({1, xv.cols()}, std::vector<double>(r.begin(), r.end())),
                  [x, row](Tape& tp, const Tensor&, const Tensor& g) {
                    Tensor& gx = tp.grad(x.id);
                    for (std::size_t c = 0; c < g.cols(); ++c) gx(row, c) += g[c];
                  });
}

Var slice_rows(Var x, std::size_t begin) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  require_rank(xv, 2, "slice_rows input");
  if (begin >= xv.rows()) throw IndexError("slice_rows: begin " + std::to_string(begin) + " of " + shape_string(xv.shape()));
  if (begin == 0) return x;
  const std::size_t n = xv.cols();
  std::vector<double> data(xv.data().begin() + static_cast<std::ptrdiff_t>(begin * n), xv.data().end());
  return t.record(Tensor({xv.rows() - begin, n}, std::move(data)), [x, begin](Tape& tp, const Tensor&, const Tensor& g) {
    Tensor& gx = tp.grad(x.id);
    const std::size_t off = begin * g.cols();
    for (std::size_t i = 0; i < g.size(); ++i) gx[off + i] += g[i];
  });
}

Var gather_rows(Var table, std::span<const std::size_t> indices) {
  Tape& t = tape_of(table);
  const Tensor& tv = table.value();
  require_rank(tv, 2, "gather_rows table");
  if (indices.empty()) throw DimensionError("gather_rows: no indices");
  const std::size_t n = tv.cols();
  std::vector<double> data;
  data.reserve(indices.size() * n);
  for (std::size_t idx : indices) {
    if (idx >= tv.rows()) throw IndexError("gather_rows: index " + std::to_string(idx) + " outside table of " + std::to_string(tv.rows()) + " rows");
    const auto r = tv.row(idx);
    data.insert(data.end(), r.begin(), r.end());
  }
  Tensor out({indices.size(), n}, std::move(data));
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return t.record(std::move(out), [table, idx = std::move(idx)](Tape& tp, const Tensor&, const Tensor& g) {
    Tensor& gt = tp.grad(table.id);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) gt(idx[r], c) += g(r, c);
    }
  });
}

Var pick_columns(Var x, std::span<const std::size_t> columns) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  require_rank(xv, 2, "pick_columns input");
  if (columns.size() != xv.rows()) throw DimensionError("pick_columns: need one column per row");
  Tensor out({xv.rows(), 1});
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    if (columns[r] >= xv.cols()) throw IndexError("pick_columns: column " + std::to_string(columns[r]) + " out of range");
    out[r] = xv(r, columns[r]);
  }
  std::vector<std::size_t> cols(columns.begin(), columns.end());
  return t.record(std::move(out), [x, cols = std::move(cols)](Tape& tp, const Tensor&, const Tensor& g) {
    Tensor& gx = tp.grad(x.id);
    for (std::size_t r = 0; r < cols.size(); ++r) gx(r, cols[r]) += g[r];
  });
}

Var mse(Var pred, double target) {
  Tape& t = tape_of(pred);
  const double p = pred.value().item();
  return t.record(Tensor::scalar(mse_loss(p, target)), [pred, target](Tape& tp, const Tensor&, const Tensor& g) {
    tp.grad(pred.id)[0] += 2.0 * (tp.value(pred.id)[0] - target) * g[0];
  });
}

Var mean_squared_error(Var pred, std::span<const double> targets) {
  Tape& t = tape_of(pred);
  const Tensor& pv = pred.value();
  if (pv.size() != targets.size()) throw DimensionError("mean_squared_error: prediction/target count mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) total += mse_loss(pv[i], targets[i]);
  const double n = static_cast<double>(pv.size());
  std::vector<double> tgt(targets.begin(), targets.end());
  return t.record(Tensor::scalar(total / n), [pred, n, tgt = std::move(tgt)](Tape& tp, const Tensor&, const Tensor& g) {
    const Tensor& pv = tp.value(pred.id);
    Tensor& gp = tp.grad(pred.id);
    for (std::size_t i = 0; i < pv.size(); ++i) gp[i] += 2.0 * (pv[i] - tgt[i]) / n * g[0];
  });
}

Var mean_huber(Var pred, std::span<const double> targets) {
  Tape& t = tape_of(pred);
  const Tensor& pv = pred.value();
  if (pv.size() != targets.size()) throw DimensionError("mean_huber: prediction/target count mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double d = std::abs(pv[i] - targets[i]);
    total += d < 1.0 ? 0.5 * d * d : d - 0.5;
  }
  const double n = static_cast<double>(pv.size());
  std::vector<double> tgt(targets.begin(), targets.end());
  return t.record(Tensor::scalar(total / n), [pred, n, tgt = std::move(tgt)](Tape& tp, const Tensor&, const Tensor& g) {
    const Tensor& pv = tp.value(pred.id);
    Tensor& gp = tp.grad(pred.id);
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double d = std::clamp(pv[i] - tgt[i], -1.0, 1.0);
      gp[i] += d / n * g[0];
    }
  });
}

}  // namespace ares::nn
