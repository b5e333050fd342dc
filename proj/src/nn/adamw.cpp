#include "ares/nn/adamw.hpp"

#include <cmath>

#include "ares/core/error.hpp"

namespace ares::nn {

void zero_grad(std::span<Parameter* const> params) {
  for (Parameter* p : params) {
    if (p->grad.shape() != p->value.shape()) p->grad = Tensor(p->value.shape());
    p->zero_grad();
  }
}

void AdamW::step(std::span<Parameter* const> params) {
  for (const Parameter* p : params) {
    if (p->grad.shape() != p->value.shape()) throw DimensionError("gradient shape mismatch for " + p->name);
    if (!p->grad.all_finite()) throw NumericError("non-finite gradient in parameter " + p->name);
  }
  if (state_.m.empty()) {
    for (const Parameter* p : params) {
      state_.m.emplace_back(p->value.shape());
      state_.v.emplace_back(p->value.shape());
      if (config_.amsgrad) state_.v_max.emplace_back(p->value.shape());
    }
  }
  if (state_.m.size() != params.size()) throw DimensionError("optimizer state does not match parameter list");

  ++state_.step_count;
  const double t = static_cast<double>(state_.step_count);
  const double bias1 = 1.0 - std::pow(config_.beta1, t);
  const double bias2 = 1.0 - std::pow(config_.beta2, t);
  const double decay = 1.0 - config_.lr * config_.weight_decay;

  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    auto value = p.value.data();
    auto grad = p.grad.data();
    auto m = state_.m[i].data();
    auto v = state_.v[i].data();
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double g = grad[j];
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g;
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g * g;
      double second = v[j];
      if (config_.amsgrad) {
        double& vmax = state_.v_max[i][j];
        vmax = std::max(vmax, v[j]);
        second = vmax;
      }
      const double m_hat = m[j] / bias1;
      const double v_hat = second / bias2;
      value[j] = value[j] * decay - config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
    if (!p.value.all_finite()) throw NumericError("parameter " + p.name + " became non-finite after optimizer step");
  }
}

}  // namespace ares::nn
