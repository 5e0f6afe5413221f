#pragma once

#include "oscsing/quadrature.hpp"

namespace oscsing::detail {

struct PanelEstimate {
  cdouble value;
  double err;
};

// Plain Gauss-Kronrod 15 with the embedded Gauss 7 rule as error estimate.
PanelEstimate gk15_panel(const ComplexMap& f, double a, double b);

// amp(t) exp(i phase(t)) on [a, b]: the phase is linearised at the centre c,
// the smooth remainder is interpolated at the Kronrod (degree 14) and Gauss
// (degree 6) nodes and integrated against exact moments of the linear part.
PanelEstimate filon_panel(const ComplexMap& amp, const RealMap& phase, const RealMap& dphase,
                          double a, double b);

// |phase(t) - phase(c) - phase'(c) (t - c)| at both panel ends.
double residual_phase(const RealMap& phase, const RealMap& dphase, double a, double b);

}  // namespace oscsing::detail
