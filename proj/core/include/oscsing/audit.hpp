#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oscsing/phase.hpp"

namespace oscsing {

// n log-spaced points in (t_min, 1]; the last point is exactly 1.
struct AuditGrid {
  double t_min = 1e-6;
  int n = 512;

  std::vector<double> points() const;
};

// Witness for the growth condition gamma'(t) >= A gamma'((1 + epsilon) t).
struct GrowthWitness {
  double epsilon = 0.0;
  double A = 0.0;
  int l = 0;        // minimal l >= 1 with 2 <= A^l < 4
  double a = 0.0;   // Whitney layer scale 5 (1 + epsilon)^l, always < 20

  // Throws InvalidWitness when the invariants above do not hold.
  void validate() const;
};

// One audited property of a phase pair.
//
// `constant` is the empirical constant of the check (C, C', C'', A, max
// ratio ...); `secondary` carries a second one where the definition has two
// (lambda for curvature_power, epsilon for growth). Both are sup/inf of the defining
// ratio over the grid, so they are reproducible from the grid alone.
struct AssumptionCheck {
  std::string id;
  bool pass = false;
  double constant = 0.0;
  double secondary = 0.0;
  double worst_t = 0.0;
  double margin = 0.0;
  std::string note;
};

struct AssumptionReport {
  std::string phase_name;
  AuditGrid grid;
  std::vector<AssumptionCheck> checks;
  std::optional<GrowthWitness> witness;

  bool pass() const;
  // Throws std::out_of_range for an unknown id.
  const AssumptionCheck& at(std::string_view id) const;
};

// Checks, in order:
//   monotone            gamma' > 0 strictly decreasing; gamma, gamma'', psi,
//                       psi' monotone
//   derivative_ratio    |psi'/psi| <= |gamma'''/gamma''| / 2 below t0
//   curvature_doubling  C = sup |gamma''(rho(2s))| / |gamma''(rho(s))|, s >= s0
//   growth              gamma'(t) >= A gamma'((1 + eps) t) below t0
//   curvature_power     |gamma''| <= C gamma'^(2 lambda), 1/2 < lambda < 1
//   amplitude_floor     C' = sup 1 / (psi sqrt|gamma''|)
//   inverse_above_t     t < rho(1/t)
//   curvature_floor     C'' = inf |gamma''| t / gamma' > 0
// Requires grid.n >= 16 and grid.t_min > 0 (std::invalid_argument otherwise).
AssumptionReport audit_assumptions(const PhasePair& p, const AuditGrid& grid = {});

// A(epsilon) = inf over grid t < t0 with (1 + epsilon) t <= 1 of
// gamma'(t) / gamma'((1 + epsilon) t). Returns +inf on an empty grid.
double growth_ratio(const PhasePair& p, double epsilon, const AuditGrid& grid = {});

// The epsilon values searched by growth_witness: 2^(k/8) - 1, k = 1..16.
std::vector<double> witness_epsilon_grid();

// Largest epsilon on the search grid whose A exceeds max(1 + epsilon, 2^(1/8))
// and admits an l with 2 <= A^l < 4. Throws NoWitness when none does.
GrowthWitness growth_witness(const PhasePair& p, const AuditGrid& grid = {});

// Witness at a fixed epsilon; throws NoWitness if A <= 1 + epsilon or A >= 4.
GrowthWitness growth_witness_at(const PhasePair& p, double epsilon,
                                const AuditGrid& grid = {});

}  // namespace oscsing
