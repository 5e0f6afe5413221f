#include "oscsing/sampled.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oscsing {

double SampledFunction::l1_norm() const {
  double s = 0.0;
  for (const cdouble& v : samples) s += std::abs(v);
  return h * s;
}

double SampledFunction::l2_norm() const {
  double s = 0.0;
  for (const cdouble& v : samples) s += std::norm(v);
  return std::sqrt(h * s);
}

double SampledFunction::sup_norm() const {
  double m = 0.0;
  for (const cdouble& v : samples) m = std::max(m, std::abs(v));
  return m;
}

cdouble SampledFunction::integral() const {
  cdouble s{0.0, 0.0};
  for (const cdouble& v : samples) s += v;
  return h * s;
}

void SampledFunction::validate() const {
  if (!(h > 0.0) || !std::isfinite(h) || !std::isfinite(x0)) {
    throw std::invalid_argument("sampled function needs finite x0 and h > 0");
  }
  for (const cdouble& v : samples) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument("sampled function has a non-finite sample");
    }
  }
}

SampledFunction SampledFunction::zeros(double x0, double h, std::size_t n) {
  SampledFunction f;
  f.x0 = x0;
  f.h = h;
  f.samples.assign(n, cdouble(0.0, 0.0));
  return f;
}

SampledFunction SampledFunction::on_grid(double x_min, double x_max, double h) {
  if (!(h > 0.0) || !(x_max >= x_min)) throw std::invalid_argument("grid needs h > 0 and x_max >= x_min");
  const auto n = static_cast<std::size_t>(std::floor((x_max - x_min) / h + 1e-9)) + 1;
  return zeros(x_min, h, n);
}

SampledFunction delta_family(double n, double x_min, double x_max, double h) {
  if (!(n > 0.0)) throw std::invalid_argument("delta family needs n > 0");
  SampledFunction f = SampledFunction::on_grid(x_min, x_max, h);
  const double right = 1.0 / n;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double c = f.x(i);
    const double overlap = std::min(c + 0.5 * h, right) - std::max(c - 0.5 * h, 0.0);
    if (overlap > 0.0) f.samples[i] = n * overlap / h;
  }
  return f;
}

SampledFunction smooth_bump(double center, double radius, double x_min, double x_max, double h) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump radius must be > 0");
  SampledFunction f = SampledFunction::on_grid(x_min, x_max, h);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double u = (f.x(i) - center) / radius;
    if (std::fabs(u) < 1.0) f.samples[i] = std::exp(-1.0 / (1.0 - u * u));
  }
  return f;
}

}  // namespace oscsing
