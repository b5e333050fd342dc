#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ares/nn/autodiff.hpp"

namespace ares::nn {

struct AdamWConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
  bool amsgrad = false;

  friend bool operator==(const AdamWConfig&, const AdamWConfig&) = default;
};

struct AdamWState {
  std::uint64_t step_count = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::vector<Tensor> v_max;  // only populated with amsgrad
};

// Adam with decoupled weight decay and bias correction. Parameters are passed
// to every step in the same order; moment buffers are matched by position.
class AdamW {
 public:
  explicit AdamW(AdamWConfig config = {}) : config_(config) {}

  // Throws NumericError naming the parameter if any gradient is non-finite,
  // before touching any value.
  void step(std::span<Parameter* const> params);

  const AdamWConfig& config() const { return config_; }
  AdamWConfig& config() { return config_; }
  const AdamWState& state() const { return state_; }
  AdamWState& state() { return state_; }

 private:
  AdamWConfig config_;
  AdamWState state_;
};

void zero_grad(std::span<Parameter* const> params);

}  // namespace ares::nn
