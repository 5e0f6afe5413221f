#include "oscsing/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "oscsing/errors.hpp"
#include "panel_rules.hpp"

namespace oscsing {

namespace {

struct Panel {
  double a;
  double b;
  cdouble value;
  double err;
  std::uint64_t id;
  bool oscillatory;
};

struct Seed {
  double a;
  double b;
  bool oscillatory;
};

using Evaluator = std::function<detail::PanelEstimate(double, double, bool)>;

bool splittable(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), std::numeric_limits<double>::min()});
  return (b - a) > 16.0 * std::numeric_limits<double>::epsilon() * scale;
}

// Worst-error-first bisection over an initial set of panels. The panel store
// is rebuilt in position order before summation so the result does not
// depend on the refinement history beyond the panel set itself.
QuadResult run_engine(const std::vector<Seed>& seeds, const Evaluator& eval, const QuadConfig& cfg) {
  std::vector<Panel> panels;
  panels.reserve(seeds.size() * 2);
  std::uint64_t next_id = 0;

  using Key = std::tuple<double, std::int64_t, std::size_t>;  // err, -id, slot
  std::priority_queue<Key> queue;

  auto push = [&](std::size_t slot) {
    const Panel& p = panels[slot];
    if (splittable(p.a, p.b) && p.err > 0.0) {
      queue.emplace(p.err, -static_cast<std::int64_t>(p.id), slot);
    }
  };

  for (const Seed& s : seeds) {
    const auto e = eval(s.a, s.b, s.oscillatory);
    panels.push_back({s.a, s.b, e.value, e.err, next_id++, s.oscillatory});
    push(panels.size() - 1);
  }

  auto totals = [&] {
    cdouble v{0.0, 0.0};
    double e = 0.0;
    for (const Panel& p : panels) {
      v += p.value;
      e += p.err;
    }
    return std::pair{v, e};
  };
  auto [total, total_err] = totals();
  auto done = [&](cdouble v, double e) {
    return e <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(v));
  };

  bool converged = done(total, total_err);
  int since_resum = 0;
  while (!converged) {
    if (static_cast<int>(panels.size()) >= cfg.max_panels || queue.empty()) break;
    const auto [err, neg_id, slot] = queue.top();
    queue.pop();
    const Panel old = panels[slot];
    if (static_cast<std::int64_t>(old.id) != -neg_id) continue;

    const double mid = 0.5 * (old.a + old.b);
    const auto el = eval(old.a, mid, old.oscillatory);
    const auto er = eval(mid, old.b, old.oscillatory);
    panels[slot] = {old.a, mid, el.value, el.err, next_id++, old.oscillatory};
    panels.push_back({mid, old.b, er.value, er.err, next_id++, old.oscillatory});
    push(slot);
    push(panels.size() - 1);

    total += el.value + er.value - old.value;
    total_err += el.err + er.err - old.err;
    if (++since_resum >= 512 || done(total, total_err)) {
      std::tie(total, total_err) = totals();
      since_resum = 0;
      converged = done(total, total_err);
    }
  }

  std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  QuadResult res;
  for (const Panel& p : panels) {
    res.value += p.value;
    res.err_estimate += p.err;
  }
  res.panels_used = static_cast<int>(panels.size());
  res.converged = done(res.value, res.err_estimate);
  return res;
}

std::vector<double> cut_points(double a, double b, std::span<const double> breakpoints) {
  std::vector<double> cuts{a, b};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

void QuadConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("quadrature tolerances must be > 0");
  if (max_panels < 1) throw std::invalid_argument("max_panels must be >= 1");
  if (!(max_phase_per_panel > 0.0) || !(max_phase_per_panel < 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("max_phase_per_panel must lie in (0, 2 pi)");
  }
  if (stationary_seeds < 1) throw std::invalid_argument("stationary_seeds must be >= 1");
}

void require_converged(const QuadResult& r, std::string_view what) {
  if (r.converged) return;
  std::ostringstream os;
  os << what << ": quadrature did not converge (err " << r.err_estimate << " after "
     << r.panels_used << " panels)";
  throw NotConverged(os.str());
}

QuadResult integrate_adaptive(const ComplexMap& f, double a, double b, const QuadConfig& cfg,
                              std::span<const double> breakpoints) {
  cfg.validate();
  if (!(a <= b)) throw std::invalid_argument("integrate_adaptive requires a <= b");
  if (a == b) return {};
  const auto cuts = cut_points(a, b, breakpoints);
  std::vector<Seed> seeds;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) seeds.push_back({cuts[i], cuts[i + 1], false});
  return run_engine(seeds, [&](double u, double v, bool) { return detail::gk15_panel(f, u, v); },
                    cfg);
}

std::vector<double> find_stationary_points(const RealMap& dphase, double a, double b, int n_seed) {
  std::vector<double> roots;
  if (!(a < b) || n_seed < 1) return roots;
  const double width = b - a;
  double t_prev = a;
  double f_prev = dphase(a);
  if (sign_of(f_prev) == 0) roots.push_back(a);
  for (int j = 1; j <= n_seed; ++j) {
    const double t = j == n_seed ? b : a + width * static_cast<double>(j) / n_seed;
    const double f = dphase(t);
    const int sf = sign_of(f);
    if (sf == 0) {
      roots.push_back(t);
    } else if (sign_of(f_prev) * sf < 0) {
      double lo = t_prev;
      double hi = t;
      int s_lo = sign_of(f_prev);
      bool exact = false;
      while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= 1e-14 * std::max(std::fabs(lo), std::fabs(hi))) break;
        const int sm = sign_of(dphase(mid));
        if (sm == 0) {
          roots.push_back(mid);
          exact = true;
          break;
        }
        if (sm == s_lo) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      if (!exact) roots.push_back(0.5 * (lo + hi));
    }
    t_prev = t;
    f_prev = f;
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (!out.empty() && std::fabs(r - out.back()) <= 1e-12 * std::max(1.0, std::fabs(r))) continue;
    out.push_back(r);
  }
  return out;
}

QuadResult integrate_oscillatory(const ComplexMap& amp, const RealMap& phase, const RealMap& dphase,
                                 double a, double b, const QuadConfig& cfg,
                                 std::span<const double> breakpoints) {
  cfg.validate();
  if (!(a <= b)) throw std::invalid_argument("integrate_oscillatory requires a <= b");
  if (a == b) return {};

  // Buffers around stationary points, sized from a difference quotient of
  // the phase derivative.
  std::vector<std::pair<double, double>> buffers;
  for (double ts : find_stationary_points(dphase, a, b, cfg.stationary_seeds)) {
    const double step = 1e-5 * std::max(std::fabs(ts), 1e-3 * (b - a));
    const double t1 = std::max(a, ts - step);
    const double t2 = std::min(b, ts + step);
    const double curv = std::fabs((dphase(t2) - dphase(t1)) / (t2 - t1));
    // Capped so a weakly curved phase does not turn the whole interval into
    // a plain Gauss-Kronrod region.
    const double r = (curv > 0.0 && std::isfinite(curv))
                         ? std::min(std::sqrt(4.0 * std::numbers::pi / curv), (b - a) / 8.0)
                         : (b - a) / 16.0;
    const double lo = std::max(a, ts - r);
    const double hi = std::min(b, ts + r);
    if (!buffers.empty() && lo <= buffers.back().second) {
      buffers.back().second = std::max(buffers.back().second, hi);
    } else {
      buffers.emplace_back(lo, hi);
    }
  }

  std::vector<double> extra(breakpoints.begin(), breakpoints.end());
  for (const auto& [lo, hi] : buffers) {
    extra.push_back(lo);
    extra.push_back(hi);
  }
  const auto cuts = cut_points(a, b, extra);

  std::vector<Seed> seeds;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double u = cuts[i];
    const double v = cuts[i + 1];
    const double m = 0.5 * (u + v);
    const bool in_buffer = std::any_of(buffers.begin(), buffers.end(),
                                       [m](const auto& bf) { return m > bf.first && m < bf.second; });
    if (in_buffer) {
      seeds.push_back({u, v, false});
      continue;
    }
    // Left-to-right bisection until the nonlinear phase per panel is small.
    std::vector<std::pair<double, double>> stack{{u, v}};
    while (!stack.empty()) {
      auto [p, q] = stack.back();
      stack.pop_back();
      if (splittable(p, q) &&
          detail::residual_phase(phase, dphase, p, q) > cfg.max_phase_per_panel) {
        const double mid = 0.5 * (p + q);
        stack.emplace_back(mid, q);
        stack.emplace_back(p, mid);
      } else {
        seeds.push_back({p, q, true});
      }
    }
  }

  const ComplexMap full = [&](double t) {
    const double ph = phase(t);
    return amp(t) * cdouble(std::cos(ph), std::sin(ph));
  };
  return run_engine(
      seeds,
      [&](double u, double v, bool osc) {
        return osc ? detail::filon_panel(amp, phase, dphase, u, v) : detail::gk15_panel(full, u, v);
      },
      cfg);
}

}  // namespace oscsing
