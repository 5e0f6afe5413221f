#include "oscsing/audit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "oscsing/errors.hpp"

namespace oscsing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack on 2 <= A^l so that closed-form witnesses such as A = 2 survive
// rounding in the log-domain ratio.
constexpr double kPowSlack = 1e-12;
constexpr double kEqualityTol = 1e-9;
// A must stay below 4 by more than rounding so that 2 <= A^l < 4 is not
// decided by the last bit (Power(2) at epsilon = 1 has A = 4 exactly).
constexpr double kFourCap = 4.0 * (1.0 - 1e-9);

struct Samples {
  std::vector<double> t;
  std::vector<SignedLog> g, g1, g2, g3, psi, psi1;
};

Samples sample(const PhasePair& p, const std::vector<double>& t) {
  Samples s;
  s.t = t;
  for (double x : t) {
    s.g.push_back(p.log_value(Derivative::Gamma, x));
    s.g1.push_back(p.log_value(Derivative::Gamma1, x));
    s.g2.push_back(p.log_value(Derivative::Gamma2, x));
    s.g3.push_back(p.log_value(Derivative::Gamma3, x));
    s.psi.push_back(p.log_value(Derivative::Psi, x));
    s.psi1.push_back(p.log_value(Derivative::Psi1, x));
  }
  return s;
}

bool all_finite(const std::vector<SignedLog>& v) {
  return std::all_of(v.begin(), v.end(), [](const SignedLog& s) {
    return s.finite() && !std::isnan(s.log_abs);
  });
}

// +1 nondecreasing, -1 nonincreasing, 0 constant, 2 not monotone.
int monotone_direction(const std::vector<SignedLog>& v, std::size_t* bad) {
  int dir = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    int step = 0;
    if (v[i] < v[i + 1]) step = 1;
    if (v[i + 1] < v[i]) step = -1;
    if (step == 0) continue;
    if (dir == 0) {
      dir = step;
    } else if (dir != step) {
      if (bad) *bad = i;
      return 2;
    }
  }
  return dir;
}

AssumptionCheck check_monotone(const Samples& s) {
  AssumptionCheck c;
  c.id = "monotone";
  std::ostringstream note;
  bool ok = all_finite(s.g1);
  double margin = kInf;
  double worst = s.t.front();
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (s.g1[i].sign != 1) {
      ok = false;
      worst = s.t[i];
      note << "gamma' <= 0 at t=" << s.t[i] << "; ";
      break;
    }
  }
  for (std::size_t i = 0; ok && i + 1 < s.t.size(); ++i) {
    const double d = s.g1[i].log_abs - s.g1[i + 1].log_abs;
    if (d < margin) {
      margin = d;
      worst = s.t[i];
    }
  }
  if (ok && !(margin > 0.0)) {
    ok = false;
    note << "gamma' not strictly decreasing; ";
  }
  const std::pair<const char*, const std::vector<SignedLog>*> others[] = {
      {"gamma", &s.g}, {"gamma''", &s.g2}, {"psi", &s.psi}, {"psi'", &s.psi1}};
  for (const auto& [name, vals] : others) {
    std::size_t bad = 0;
    if (!all_finite(*vals)) {
      ok = false;
      note << name << " not finite; ";
      continue;
    }
    const int dir = monotone_direction(*vals, &bad);
    if (dir == 2) {
      ok = false;
      worst = s.t[bad];
      note << name << " not monotone near t=" << s.t[bad] << "; ";
    } else {
      note << name << (dir > 0 ? " increasing; " : dir < 0 ? " decreasing; " : " constant; ");
    }
  }
  c.pass = ok;
  c.margin = margin;
  c.constant = margin;
  c.worst_t = worst;
  c.note = note.str();
  return c;
}

AssumptionCheck check_derivative_ratio(const Samples& s, double t0) {
  AssumptionCheck c;
  c.id = "derivative_ratio";
  double max_ratio = -kInf;
  double min_ratio = kInf;
  bool ok = true;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (!(s.t[i] < t0)) continue;
    const double lhs = s.psi1[i].log_abs - s.psi[i].log_abs;
    const double rhs = std::log(0.5) + s.g3[i].log_abs - s.g2[i].log_abs;
    const double r = std::exp(lhs - rhs);
    if (!std::isfinite(r)) ok = false;
    if (r > max_ratio) {
      max_ratio = r;
      c.worst_t = s.t[i];
    }
    min_ratio = std::min(min_ratio, r);
  }
  c.constant = max_ratio;
  c.secondary = min_ratio;
  c.margin = 1.0 - max_ratio;
  c.pass = ok && max_ratio <= 1.0 + kEqualityTol;
  c.note = "ratio |psi'/psi| / (|gamma'''/gamma''| / 2); constant = max, secondary = min";
  return c;
}

AssumptionCheck check_curvature_doubling(const PhasePair& p, const Samples& s) {
  AssumptionCheck c;
  c.id = "curvature_doubling";
  const double log_s0 = std::log(p.s0());
  double best = -kInf;
  bool ok = true;
  int used = 0;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (!(s.g1[i].log_abs >= log_s0)) continue;
    const double t2 = p.gamma_prime_inverse_log(std::log(2.0) + s.g1[i].log_abs).t;
    const SignedLog g2_at = p.log_value(Derivative::Gamma2, t2);
    const double r = std::exp(g2_at.log_abs - s.g2[i].log_abs);
    if (!std::isfinite(r) || !(r > 0.0)) ok = false;
    ++used;
    if (r > best) {
      best = r;
      c.worst_t = s.t[i];
    }
  }
  c.constant = best;
  c.pass = ok && used > 0 && std::isfinite(best);
  c.margin = c.pass ? 1.0 / best : 0.0;
  c.note = "C = sup |gamma''(rho(2s))| / |gamma''(rho(s))| over s = gamma'(t) >= s0";
  return c;
}

AssumptionCheck check_curvature_power(const Samples& s, double t0) {
  AssumptionCheck c;
  c.id = "curvature_power";
  // lambda = sup of the local exponent d ln|gamma''| / (2 d ln gamma'); with
  // it the ratio |gamma''| / gamma'^(2 lambda) is nondecreasing in t, so the
  // sup over the grid bounds it on the whole sampled range.
  double lambda = -kInf;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.t.size(); ++i)
    if (s.t[i] < t0) idx.push_back(i);
  bool ok = idx.size() >= 2 && all_finite(s.g1) && all_finite(s.g2);
  for (std::size_t j = 0; ok && j + 1 < idx.size(); ++j) {
    const std::size_t a = idx[j];
    const std::size_t b = idx[j + 1];
    const double slope = 0.5 * (s.g2[b].log_abs - s.g2[a].log_abs) /
                         (s.g1[b].log_abs - s.g1[a].log_abs);
    if (slope > lambda) {
      lambda = slope;
      c.worst_t = s.t[a];
    }
  }
  double C = -kInf;
  for (std::size_t i : idx) {
    C = std::max(C, std::exp(s.g2[i].log_abs - 2.0 * lambda * s.g1[i].log_abs));
  }
  c.constant = C;
  c.secondary = lambda;
  c.margin = std::min(lambda - 0.5, 1.0 - lambda);
  c.pass = ok && lambda > 0.5 && lambda < 1.0 && std::isfinite(C);
  c.note = "secondary = lambda (sup local exponent), constant = C";
  return c;
}

AssumptionCheck check_amplitude_floor(const Samples& s, double t0) {
  AssumptionCheck c;
  c.id = "amplitude_floor";
  double best = -kInf;
  bool ok = true;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (!(s.t[i] < t0)) continue;
    const double v = std::exp(-s.psi[i].log_abs - 0.5 * s.g2[i].log_abs);
    if (!std::isfinite(v)) ok = false;
    if (v > best) {
      best = v;
      c.worst_t = s.t[i];
    }
  }
  c.constant = best;
  c.pass = ok && std::isfinite(best);
  c.note = "C' = sup 1 / (psi sqrt|gamma''|)";
  return c;
}

AssumptionCheck check_inverse_above_t(const PhasePair& p, const Samples& s, double t0) {
  AssumptionCheck c;
  c.id = "inverse_above_t";
  double margin = kInf;
  bool ok = true;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (!(s.t[i] < t0)) continue;
    const double inv = p.gamma_prime_inverse_log(-std::log(s.t[i])).t;
    const double m = inv / s.t[i] - 1.0;
    if (!(m > 0.0)) ok = false;
    if (m < margin) {
      margin = m;
      c.worst_t = s.t[i];
    }
  }
  c.margin = margin;
  c.constant = margin;
  c.pass = ok;
  c.note = "t < rho(1/t); margin = min rho(1/t)/t - 1";
  return c;
}

AssumptionCheck check_curvature_floor(const Samples& s, double t0) {
  AssumptionCheck c;
  c.id = "curvature_floor";
  double best = kInf;
  bool ok = true;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (!(s.t[i] < t0)) continue;
    const double v = std::exp(s.g2[i].log_abs + std::log(s.t[i]) - s.g1[i].log_abs);
    if (!std::isfinite(v)) ok = false;
    if (v < best) {
      best = v;
      c.worst_t = s.t[i];
    }
  }
  c.constant = best;
  c.pass = ok && best > 0.0 && std::isfinite(best);
  c.note = "C'' = inf |gamma''| t / gamma'";
  return c;
}

template <typename F>
AssumptionCheck guarded(const char* id, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    AssumptionCheck c;
    c.id = id;
    c.pass = false;
    c.note = std::string("audit error: ") + e.what();
    return c;
  }
}

int minimal_l(double A) {
  int l = 1;
  double p = A;
  while (p < 2.0 * (1.0 - kPowSlack) && l < 1000) {
    p *= A;
    ++l;
  }
  return l;
}

GrowthWitness make_witness(double eps, double A) {
  GrowthWitness w;
  w.epsilon = eps;
  w.A = A;
  w.l = minimal_l(A);
  w.a = 5.0 * std::pow(1.0 + eps, w.l);
  return w;
}

}  // namespace

std::vector<double> AuditGrid::points() const {
  if (n < 2 || !(t_min > 0.0) || !(t_min < 1.0)) {
    throw std::invalid_argument("audit grid needs n >= 2 and 0 < t_min < 1");
  }
  std::vector<double> t(static_cast<std::size_t>(n));
  const double lm = std::log(t_min);
  for (int i = 1; i <= n; ++i) {
    t[static_cast<std::size_t>(i - 1)] = std::exp(lm * (1.0 - static_cast<double>(i) / n));
  }
  t.back() = 1.0;
  return t;
}

void GrowthWitness::validate() const {
  std::ostringstream os;
  const double Al = std::pow(A, l);
  if (!(epsilon > 0.0)) os << "epsilon <= 0; ";
  if (!(A > 1.0 + epsilon)) os << "A <= 1 + epsilon; ";
  if (l < 1) os << "l < 1; ";
  if (!(Al >= 2.0 * (1.0 - kPowSlack)) || !(Al < 4.0)) os << "A^l outside [2, 4); ";
  const double a_expected = 5.0 * std::pow(1.0 + epsilon, l);
  if (!(std::fabs(a - a_expected) <= 1e-12 * a_expected)) os << "a != 5 (1 + epsilon)^l; ";
  if (!(a < 20.0)) os << "a >= 20; ";
  const std::string msg = os.str();
  if (!msg.empty()) throw InvalidWitness("invalid growth witness: " + msg);
}

bool AssumptionReport::pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const AssumptionCheck& AssumptionReport::at(std::string_view id) const {
  for (const auto& c : checks)
    if (c.id == id) return c;
  throw std::out_of_range("no assumption check named " + std::string(id));
}

double growth_ratio(const PhasePair& p, double epsilon, const AuditGrid& grid) {
  double A = kInf;
  for (double t : grid.points()) {
    if (!(t < p.t0())) continue;
    const double t2 = (1.0 + epsilon) * t;
    if (t2 > 1.0) continue;
    const double r = std::exp(p.log_value(Derivative::Gamma1, t).log_abs -
                              p.log_value(Derivative::Gamma1, t2).log_abs);
    if (std::isnan(r)) return std::numeric_limits<double>::quiet_NaN();
    A = std::min(A, r);
  }
  return A;
}

std::vector<double> witness_epsilon_grid() {
  std::vector<double> eps;
  for (int k = 1; k <= 16; ++k) eps.push_back(std::exp2(k / 8.0) - 1.0);
  return eps;
}

GrowthWitness growth_witness(const PhasePair& p, const AuditGrid& grid) {
  const double floor_A = std::exp2(1.0 / 8.0);
  std::optional<GrowthWitness> best;
  for (double eps : witness_epsilon_grid()) {
    const double A = growth_ratio(p, eps, grid);
    if (!std::isfinite(A)) continue;
    if (A > std::max(1.0 + eps, floor_A) && A < kFourCap) best = make_witness(eps, A);
  }
  if (!best) throw NoWitness("no epsilon on the search grid yields a growth witness for " + p.name());
  return *best;
}

GrowthWitness growth_witness_at(const PhasePair& p, double epsilon, const AuditGrid& grid) {
  const double A = growth_ratio(p, epsilon, grid);
  if (!(A > 1.0 + epsilon) || !(A < kFourCap) || !std::isfinite(A)) {
    std::ostringstream os;
    os << "epsilon = " << epsilon << " gives A = " << A << " for " << p.name();
    throw NoWitness(os.str());
  }
  return make_witness(epsilon, A);
}

AssumptionReport audit_assumptions(const PhasePair& p, const AuditGrid& grid) {
  if (grid.n < 16 || !(grid.t_min > 0.0)) {
    throw std::invalid_argument("audit requires n >= 16 and t_min > 0");
  }
  AssumptionReport rep;
  rep.phase_name = p.name();
  rep.grid = grid;
  const auto t = grid.points();

  Samples s;
  try {
    s = sample(p, t);
  } catch (const std::exception& e) {
    for (const char* id : {"monotone", "derivative_ratio", "curvature_doubling", "growth", "curvature_power", "amplitude_floor", "inverse_above_t", "curvature_floor"}) {
      AssumptionCheck c;
      c.id = id;
      c.note = std::string("audit error: ") + e.what();
      rep.checks.push_back(c);
    }
    return rep;
  }

  const double t0 = p.t0();
  rep.checks.push_back(guarded("monotone", [&] { return check_monotone(s); }));
  rep.checks.push_back(guarded("derivative_ratio", [&] { return check_derivative_ratio(s, t0); }));
  rep.checks.push_back(guarded("curvature_doubling", [&] { return check_curvature_doubling(p, s); }));
  rep.checks.push_back(guarded("growth", [&] {
    AssumptionCheck c;
    c.id = "growth";
    try {
      const GrowthWitness w = growth_witness(p, grid);
      rep.witness = w;
      c.pass = true;
      c.constant = w.A;
      c.secondary = w.epsilon;
      c.margin = w.A - (1.0 + w.epsilon);
      std::ostringstream os;
      os << "l = " << w.l << ", a = " << w.a;
      c.note = os.str();
    } catch (const NoWitness& e) {
      c.pass = false;
      c.note = e.what();
    }
    return c;
  }));
  rep.checks.push_back(guarded("curvature_power", [&] { return check_curvature_power(s, t0); }));
  rep.checks.push_back(guarded("amplitude_floor", [&] { return check_amplitude_floor(s, t0); }));
  rep.checks.push_back(guarded("inverse_above_t", [&] { return check_inverse_above_t(p, s, t0); }));
  rep.checks.push_back(guarded("curvature_floor", [&] { return check_curvature_floor(s, t0); }));
  return rep;
}

}  // namespace oscsing
