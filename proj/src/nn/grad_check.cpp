#include "ares/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace ares::nn {

GradCheckReport gradient_check(const std::function<double()>& loss, std::span<Parameter* const> params,
                               double epsilon, double tolerance) {
  GradCheckReport report;
  for (Parameter* p : params) {
    auto values = p->value.data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + epsilon;
      const double up = loss();
      values[i] = original - epsilon;
      const double down = loss();
      values[i] = original;

      const double numeric = (up - down) / (2.0 * epsilon);
      const double analytic = p->grad[i];
      const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
      const double rel = std::abs(analytic - numeric) / denom;
      ++report.entries_checked;
      if (rel > report.max_relative_error || report.entries_checked == 1) {
        report.max_relative_error = rel;
        report.worst_parameter = p->name;
        report.worst_index = i;
        report.analytic = analytic;
        report.numeric = numeric;
      }
    }
  }
  report.passed = report.max_relative_error < tolerance;
  return report;
}

}  // namespace ares::nn
