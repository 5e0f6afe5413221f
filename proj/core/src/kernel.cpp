#include "oscsing/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "oscsing/errors.hpp"

namespace oscsing {

void KernelSpec::validate() const {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("kernel truncation eps must lie in (0, 1]");
  if (!std::isfinite(beta)) throw DomainError("kernel modulation beta must be finite");
}

double KernelSpec::argument(double t) const {
  const double g = phase.gamma(t);
  if (beta == 0.0) return g;
  return g + beta * (phase.log_psi(t) - std::log(t));
}

cdouble kernel_eval(const KernelSpec& k, double x) {
  if (!(x >= k.eps && x <= 1.0)) return {0.0, 0.0};
  const double arg = k.argument(x);
  return cdouble(std::cos(arg), std::sin(arg)) / x;
}

QuadResult kernel_fourier(const KernelSpec& k, double xi, const QuadConfig& cfg) {
  k.validate();
  const double beta = k.beta;
  const PhasePair& p = k.phase;
  // The slowly varying beta factor stays in the amplitude so the stationary
  // point of the phase is exactly rho(xi).
  const ComplexMap amp = [&](double t) {
    if (beta == 0.0) return cdouble(1.0 / t, 0.0);
    const double m = beta * (p.log_psi(t) - std::log(t));
    return cdouble(std::cos(m), std::sin(m)) / t;
  };
  const RealMap phase = [&](double t) { return p.gamma(t) - xi * t; };
  const RealMap dphase = [&](double t) { return p.gamma1(t) - xi; };
  return integrate_oscillatory(amp, phase, dphase, k.eps, 1.0, cfg);
}

double decay_bound(const KernelSpec& k, double xi) {
  const double scale = 1.0 + std::fabs(k.beta);
  if (!(std::fabs(xi) > 1.0)) return scale;
  const double ts = k.phase.gamma_prime_inverse(std::fabs(xi)).t;
  const double root_curv = std::exp(0.5 * k.phase.log_value(Derivative::Gamma2, ts).log_abs);
  return scale / (root_curv * ts);
}

QuadResult smoothness_integral(const KernelSpec& k, double y, const QuadConfig& cfg,
                               std::optional<double> eta) {
  k.validate();
  if (y == 0.0) return {};
  const double bound = eta.value_or(k.phase.t0());
  if (!(std::fabs(y) < bound)) throw DomainError("smoothness integral needs |y| < eta");

  const double r = 2.0 * k.phase.rho(1.0 / std::fabs(y));
  const double lo = std::min(k.eps, k.eps + y);
  const double hi = std::max(1.0, 1.0 + y);
  const ComplexMap diff = [&](double x) {
    return cdouble(std::abs(kernel_eval(k, x - y) - kernel_eval(k, x)), 0.0);
  };
  const double kinks[] = {k.eps, 1.0, k.eps + y, 1.0 + y};

  QuadResult total;
  auto add_piece = [&](double u, double v) {
    if (!(u < v)) return;
    const QuadResult part = integrate_adaptive(diff, u, v, cfg, kinks);
    total.value += part.value;
    total.err_estimate += part.err_estimate;
    total.panels_used += part.panels_used;
    total.converged = total.converged && part.converged;
  };
  add_piece(lo, std::min(hi, -r));
  add_piece(std::max(lo, r), hi);
  return total;
}

}  // namespace oscsing
