#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace ratingnet::nn {

/// A buffer to perturb and the analytic gradient computed for it.
struct GradTarget {
  std::string name;
  std::vector<double>* values;
  std::vector<double> analytic;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst;  // "name[index]"
  std::size_t checked = 0;

  bool passed(double tolerance) const { return checked > 0 && max_rel_error < tolerance; }
};

struct GradCheckOptions {
  double step = 1e-6;
  // Denominator floor so that gradients near zero are compared absolutely.
  double floor = 1e-6;
  // Elements checked per tensor, evenly strided; 0 checks all.
  std::size_t max_per_tensor = 0;
};

/// Central finite differences of `loss()` against each target's analytic gradient.
template <typename LossFn>
GradCheckReport grad_check(LossFn&& loss, std::vector<GradTarget>& targets, const GradCheckOptions& opt = {}) {
  GradCheckReport report;
  for (auto& t : targets) {
    auto& v = *t.values;
    const std::size_t n = v.size();
    const std::size_t stride = opt.max_per_tensor == 0 || n <= opt.max_per_tensor ? 1 : n / opt.max_per_tensor;
    for (std::size_t i = 0; i < n; i += stride) {
      const double saved = v[i];
      v[i] = saved + opt.step;
      const double up = loss();
      v[i] = saved - opt.step;
      const double down = loss();
      v[i] = saved;
      const double numeric = (up - down) / (2.0 * opt.step);
      const double a = t.analytic[i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), opt.floor});
      ++report.checked;
      if (rel >= report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst = t.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return report;
}

}  // namespace ratingnet::nn
