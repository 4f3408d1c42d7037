#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fuelcalc/errors.hpp"

namespace fuelcalc {

// mean of |(pred - truth) / truth|
inline double mape(const std::vector<double>& pred, const std::vector<double>& truth) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw ShapeMismatch("mape requires equal non-empty inputs");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] == 0.0) throw ZeroTruth("truth value at index " + std::to_string(i) + " is zero");
    sum += std::fabs((pred[i] - truth[i]) / truth[i]);
  }
  return sum / static_cast<double>(pred.size());
}

// sqrt(int |f - f_ref|^2) / sqrt(int |f_ref|^2), trapezoid rule on a common
// uniform grid.
inline double rel_l2(const std::vector<double>& f, const std::vector<double>& f_ref,
                     const std::vector<double>& grid) {
  if (f.size() != f_ref.size() || f.size() != grid.size() || f.size() < 2) {
    throw ShapeMismatch("rel_l2 requires equal-length curves and grid, length >= 2");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    const double d0 = f[i] - f_ref[i], d1 = f[i + 1] - f_ref[i + 1];
    num += 0.5 * h * (d0 * d0 + d1 * d1);
    den += 0.5 * h * (f_ref[i] * f_ref[i] + f_ref[i + 1] * f_ref[i + 1]);
  }
  if (den <= 0.0) throw ZeroReference("reference curve has zero L2 norm");
  return std::sqrt(num / den);
}

// Least-squares slope of log(error) against log(size). Negative for decaying
// error; published convergence-rate tables usually quote the magnitude.
inline double convergence_slope(const std::vector<double>& sizes,
                                const std::vector<double>& errors) {
  if (sizes.size() != errors.size() || sizes.size() < 3) {
    throw InvalidArgument("convergence_slope needs >= 3 (size, error) pairs");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] > 0.0) || !(errors[i] > 0.0)) {
      throw InvalidArgument("sizes and errors must be positive");
    }
    const double x = std::log(sizes[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 1e-12 * n * sxx || sxx == 0.0) {
    throw DegenerateFit("all sizes are equal; slope undefined");
  }
  return (n * sxy - sx * sy) / denom;
}

struct EvalReport {
  std::string group;  // empty for the overall row
  std::size_t n = 0;
  double mape = 0.0;
};

}  // namespace fuelcalc
