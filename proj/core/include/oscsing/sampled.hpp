#pragma once

#include <cstddef>
#include <vector>

#include "oscsing/quadrature.hpp"

namespace oscsing {

// Samples on the uniform grid x_i = x0 + i h.
struct SampledFunction {
  double x0 = 0.0;
  double h = 1.0;
  std::vector<cdouble> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double x(std::size_t i) const { return x0 + h * static_cast<double>(i); }
  double x_last() const { return x(samples.empty() ? 0 : samples.size() - 1); }

  double l1_norm() const;
  double l2_norm() const;
  double sup_norm() const;
  // h * sum of samples.
  cdouble integral() const;

  // Throws std::invalid_argument unless h > 0 and every sample is finite.
  void validate() const;

  static SampledFunction zeros(double x0, double h, std::size_t n);
  // Grid on [x_min, x_max] with spacing h; the last node is the largest
  // x0 + i h not exceeding x_max (up to rounding).
  static SampledFunction on_grid(double x_min, double x_max, double h);
};

// n chi_[0, 1/n] with each sample equal to the average over its cell
// [x_i - h/2, x_i + h/2], so the grid mass is 1 whenever [0, 1/n] lies inside
// the grid.
SampledFunction delta_family(double n, double x_min, double x_max, double h);

// exp(-1 / (1 - ((x - center) / radius)^2)) inside the radius, 0 outside.
SampledFunction smooth_bump(double center, double radius, double x_min, double x_max, double h);

}  // namespace oscsing
