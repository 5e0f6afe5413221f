#pragma once

#include <optional>

#include "oscsing/phase.hpp"
#include "oscsing/quadrature.hpp"

namespace oscsing {

// K(x) = exp(i gamma(x)) x^(-1 - i beta) psi(x)^(i beta) on [eps, 1], zero
// elsewhere.
struct KernelSpec {
  PhasePair phase;
  double eps = 1e-2;
  double beta = 0.0;

  // Throws DomainError unless 0 < eps <= 1 and beta is finite.
  void validate() const;
  // gamma(t) + beta (ln psi(t) - ln t): the full argument of K at t.
  double argument(double t) const;
};

cdouble kernel_eval(const KernelSpec& k, double x);

// Transform with the convention  int K(t) exp(-i xi t) dt,  so the
// stationary point sits at rho(xi) for positive xi.
QuadResult kernel_fourier(const KernelSpec& k, double xi, const QuadConfig& cfg = {});

// (1 + |beta|) / (sqrt|gamma''(t*)| t*) with t* = rho(|xi|) when |xi| > 1,
// and 1 + |beta| otherwise.
double decay_bound(const KernelSpec& k, double xi);

// int_{|x| >= 2 rho(1/|y|)} |K(x - y) - K(x)| dx, with the real value in
// result.value.real(). Exactly zero for y = 0. Throws DomainError when
// |y| >= eta (default: the phase's t0).
QuadResult smoothness_integral(const KernelSpec& k, double y, const QuadConfig& cfg = {},
                               std::optional<double> eta = std::nullopt);

}  // namespace oscsing
