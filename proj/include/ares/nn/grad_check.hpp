#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "ares/nn/autodiff.hpp"

namespace ares::nn {

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t entries_checked = 0;
  bool passed = true;
};

// Compares the gradients already stored in each Parameter::grad against
// central differences of `loss`. The relative error per entry is
// |analytic - numeric| / max(1, |analytic|, |numeric|). Values are restored
// bit-exactly after each perturbation. `loss` must be deterministic.
GradCheckReport gradient_check(const std::function<double()>& loss, std::span<Parameter* const> params,
                               double epsilon, double tolerance);

}  // namespace ares::nn
