#pragma once

#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

namespace oscsing {

using cdouble = std::complex<double>;
using ComplexMap = std::function<cdouble(double)>;
using RealMap = std::function<double(double)>;

struct QuadConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  int max_panels = 1 << 20;
  // Bound on the nonlinear part of the phase across one oscillatory panel.
  double max_phase_per_panel = std::numbers::pi / 2;
  // Uniform samples used to locate stationary points.
  int stationary_seeds = 1024;

  // Throws std::invalid_argument on a malformed config.
  void validate() const;
};

struct QuadResult {
  cdouble value{0.0, 0.0};
  double err_estimate = 0.0;
  int panels_used = 0;
  bool converged = true;
};

// Throws NotConverged naming `what` when r.converged is false.
void require_converged(const QuadResult& r, std::string_view what);

// Adaptive Gauss-Kronrod 15/7 bisection, worst panel first (ties broken by
// creation order). Optional interior breakpoints seed the initial panels.
// Exhausting max_panels returns the best estimate with converged = false.
QuadResult integrate_adaptive(const ComplexMap& f, double a, double b, const QuadConfig& cfg = {},
                              std::span<const double> breakpoints = {});

// Sign changes of dphase among n_seed + 1 uniform samples on [a, b], refined
// by bisection; sorted and deduplicated.
std::vector<double> find_stationary_points(const RealMap& dphase, double a, double b,
                                           int n_seed = 1024);

// Integral of amp(t) exp(i phase(t)) over [a, b].
//
// Stationary points get a buffer of radius sqrt(4 pi / |phase''|) integrated
// with plain Gauss-Kronrod panels. Elsewhere each panel removes the linear
// part of the phase at its centre and integrates the remaining smooth factor
// against the exact Legendre moments of exp(i Omega x), so the panel count
// depends on the curvature of the phase rather than on its total increment.
QuadResult integrate_oscillatory(const ComplexMap& amp, const RealMap& phase,
                                 const RealMap& dphase, double a, double b,
                                 const QuadConfig& cfg = {},
                                 std::span<const double> breakpoints = {});

namespace detail {

// j_0(x) .. j_m_max(x), written to out[0..m_max].
void spherical_bessel(int m_max, double x, double* out);

}  // namespace detail

}  // namespace oscsing
