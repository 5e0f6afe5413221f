#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "oscsing/audit.hpp"
#include "oscsing/errors.hpp"
#include "oscsing/operator.hpp"
#include "oscsing/sampled.hpp"
#include "oscsing/version.hpp"

namespace oscsing::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Evaluates fn(0) .. fn(n - 1) on up to `workers` threads. Results keep index
// order; the exception of the lowest failing index is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, int workers, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto drain = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (threads <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::string fmt(double v) { return format_real(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::string beta_tag(double beta) { return "beta=" + fmt(beta); }

// max/min of positive values; +inf when some value is zero.
double spread_of(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*lo <= 0.0) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (x.size() < 2 || den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

std::vector<double> log_grid(double lo, double hi, long points) {
  std::vector<double> out;
  if (points == 1) return {lo};
  for (long i = 0; i < points; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(points - 1);
    out.push_back(i == points - 1 ? hi : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * s));
  }
  return out;
}

struct Input {
  std::string label;
  SampledFunction f;
};

std::vector<cdouble> read_samples(const std::string& path, long expected) {
  if (path.empty()) throw UsageError("input.kind=samples needs input.path");
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read samples file " + path);
  std::vector<cdouble> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find(',');
    const auto number = [&](std::string_view text) {
      while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
      while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw UsageError(path + ":" + std::to_string(line_no) + ": expected 're' or 're,im'");
      }
      return v;
    };
    const std::string_view whole(line);
    const double re = number(whole.substr(0, comma));
    const double im = comma == std::string::npos ? 0.0 : number(whole.substr(comma + 1));
    out.emplace_back(re, im);
  }
  if (static_cast<long>(out.size()) != expected) {
    throw UsageError(path + ": " + std::to_string(out.size()) + " samples, grid.n is " + std::to_string(expected));
  }
  return out;
}

std::vector<Input> make_inputs(const Config& cfg) {
  const double lo = cfg.real("grid.x_min");
  const double hi = cfg.real("grid.x_max");
  const double h = cfg.grid_h();
  const std::string& kind = cfg.text("input.kind");
  std::vector<Input> out;
  if (kind == "delta") {
    for (double n : cfg.reals("input.n")) {
      if (!(n > 0.0)) throw UsageError("input.n entries must be positive");
      out.push_back({"delta_n=" + fmt(n), delta_family(n, lo, hi, h)});
    }
  } else if (kind == "bump") {
    const double r = cfg.real("input.radius");
    if (!(r > 0.0)) throw UsageError("input.radius must be positive");
    out.push_back({"bump", smooth_bump(cfg.real("input.center"), r, lo, hi, h)});
  } else {
    SampledFunction f{lo, h, read_samples(cfg.text("input.path"), cfg.integer("grid.n"))};
    out.push_back({"samples", std::move(f)});
  }
  return out;
}

OperatorMethod method_of(const Config& cfg) {
  return cfg.text("operator.method") == "direct" ? OperatorMethod::Direct : OperatorMethod::Fast;
}

AuditGrid audit_grid(const Config& cfg) {
  const AuditGrid g{cfg.real("audit.t_min"), static_cast<int>(cfg.integer("audit.points"))};
  if (!(g.t_min > 0.0 && g.t_min < 1.0)) throw UsageError("audit.t_min must lie in (0, 1)");
  if (g.n < 16) throw UsageError("audit.points must be at least 16");
  return g;
}

GrowthWitness witness_for(const PhasePair& p, const Config& cfg) {
  try {
    return growth_witness(p, audit_grid(cfg));
  } catch (const NoWitness& e) {
    throw UsageError(std::string("phase admits no growth witness: ") + e.what());
  }
}

void add_witness_constants(RunResult& r, const GrowthWitness& w) {
  r.constant("witness.epsilon", w.epsilon);
  r.constant("witness.A", w.A);
  r.constant("witness.l", w.l);
  r.constant("witness.a", w.a);
}

RunResult run_audit(const Config& cfg) {
  RunResult r;
  const PhasePair p = cfg.phase();
  const AssumptionReport rep = audit_assumptions(p, audit_grid(cfg));
  r.table.columns = {"check", "pass", "constant", "secondary", "worst_t", "margin", "note"};
  r.table.sources = {{"audit_assumptions", "check,pass,constant,secondary,worst_t,margin,note"}};
  for (const AssumptionCheck& c : rep.checks) {
    r.table.add_row({c.id, fmt_bool(c.pass), fmt(c.constant), fmt(c.secondary), fmt(c.worst_t), fmt(c.margin), c.note});
    r.constant(c.id, c.constant);
    if (c.secondary != 0.0) r.constant(c.id + ".secondary", c.secondary);
    if (!c.pass) r.fail("audit check " + c.id + " failed: " + c.note);
  }
  if (rep.witness) add_witness_constants(r, *rep.witness);
  return r;
}

RunResult run_decay(const Config& cfg, int workers) {
  RunResult r;
  const double xi_min = cfg.real("xi.min");
  const double xi_max = cfg.real("xi.max");
  const long points = cfg.integer("xi.points");
  if (!(xi_min > 0.0 && xi_min < xi_max)) throw UsageError("need 0 < xi.min < xi.max");
  if (points < 2) throw UsageError("xi.points must be at least 2");
  const std::vector<double> betas = cfg.reals("kernel.beta");
  std::vector<KernelSpec> kernels;
  for (double b : betas) kernels.push_back(cfg.kernel(b));
  const QuadConfig q = cfg.quad();
  const std::vector<double> xis = log_grid(xi_min, xi_max, points);

  const std::size_t per = xis.size();
  const auto results = parallel_map<QuadResult>(betas.size() * per, workers, [&](std::size_t i) {
    return kernel_fourier(kernels[i / per], xis[i % per], q);
  });

  const PhasePair p = cfg.phase();
  const bool power = p.family() == PhaseFamily::Power;
  const double expected = power ? -(p.sigma() - 1.0) / (2.0 * p.sigma()) : 0.0;
  const double spread_bound = cfg.real("check.decay_spread");
  const double slope_tol = cfg.real("check.slope_tol");

  r.table.columns = {"beta", "xi", "re", "im", "abs", "err", "panels", "converged", "bound", "ratio", "fitted_slope"};
  r.table.sources = {{"kernel_fourier", "re,im,abs,err,panels,converged"},
                     {"decay_bound", "bound,ratio"},
                     {"least_squares_log_abs", "fitted_slope"}};
  for (std::size_t b = 0; b < betas.size(); ++b) {
    std::vector<double> lx, ly, ratios;
    bool converged = true;
    for (std::size_t j = 0; j < per; ++j) {
      const QuadResult& res = results[b * per + j];
      converged = converged && res.converged;
      ratios.push_back(std::abs(res.value) / decay_bound(kernels[b], xis[j]));
      lx.push_back(std::log(xis[j]));
      ly.push_back(std::log(std::abs(res.value)));
    }
    const double slope = fitted_slope(lx, ly);
    for (std::size_t j = 0; j < per; ++j) {
      const QuadResult& res = results[b * per + j];
      r.table.add_row({fmt(betas[b]), fmt(xis[j]), fmt(res.value.real()), fmt(res.value.imag()),
                       fmt(std::abs(res.value)), fmt(res.err_estimate), fmt(res.panels_used),
                       fmt_bool(res.converged), fmt(decay_bound(kernels[b], xis[j])), fmt(ratios[j]), fmt(slope)});
    }
    const std::string tag = beta_tag(betas[b]);
    const double spread = spread_of(ratios);
    r.constant("decay." + tag + ".max_ratio", *std::max_element(ratios.begin(), ratios.end()));
    r.constant("decay." + tag + ".spread", spread);
    r.constant("decay." + tag + ".slope", slope);
    if (!converged) r.fail(tag + ": transform did not converge at some frequency");
    if (!(spread <= spread_bound)) r.fail(tag + ": ratio max/min " + fmt(spread) + " exceeds " + fmt(spread_bound));
    if (power && !(std::fabs(slope - expected) <= slope_tol)) {
      r.fail(tag + ": fitted slope " + fmt(slope) + " is not within " + fmt(slope_tol) + " of " + fmt(expected));
    }
  }
  if (power) r.constant("decay.expected_slope", expected);
  return r;
}

RunResult run_smooth(const Config& cfg, int workers) {
  RunResult r;
  const std::vector<double> betas = cfg.reals("kernel.beta");
  std::vector<KernelSpec> kernels;
  for (double b : betas) kernels.push_back(cfg.kernel(b));
  const QuadConfig q = cfg.quad();
  const PhasePair p = cfg.phase();
  std::vector<double> ys = cfg.reals("y.values");
  for (double y : ys) {
    if (!(std::fabs(y) < p.t0())) throw UsageError("y.values entries must satisfy |y| < " + fmt(p.t0()));
  }
  ys.insert(ys.begin(), 0.0);

  const std::size_t per = ys.size();
  const auto results = parallel_map<QuadResult>(betas.size() * per, workers, [&](std::size_t i) {
    return smoothness_integral(kernels[i / per], ys[i % per], q);
  });

  const double bound = cfg.real("check.smooth_spread");
  r.table.columns = {"beta", "y", "value", "normalised", "err", "panels", "converged"};
  r.table.sources = {{"smoothness_integral", "value,err,panels,converged"}, {"scale_by_one_plus_abs_beta", "normalised"}};
  std::vector<double> pooled;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    const double scale = 1.0 + std::fabs(betas[b]);
    std::vector<double> values;
    bool converged = true;
    for (std::size_t j = 0; j < per; ++j) {
      const QuadResult& res = results[b * per + j];
      const double v = res.value.real();
      converged = converged && res.converged;
      r.table.add_row({fmt(betas[b]), fmt(ys[j]), fmt(v), fmt(v / scale), fmt(res.err_estimate),
                       fmt(res.panels_used), fmt_bool(res.converged)});
      if (j > 0) {
        values.push_back(v / scale);
        pooled.push_back(v / scale);
      }
    }
    const std::string tag = beta_tag(betas[b]);
    const double spread = spread_of(values);
    r.constant("smooth." + tag + ".sup", *std::max_element(values.begin(), values.end()));
    r.constant("smooth." + tag + ".spread", spread);
    if (results[b * per].value != cdouble{}) r.fail(tag + ": y=0 does not give exactly 0");
    if (!converged) r.fail(tag + ": smoothness integral did not converge at some y");
    if (!(spread <= bound)) r.fail(tag + ": sup/min " + fmt(spread) + " exceeds " + fmt(bound));
  }
  const double pooled_spread = spread_of(pooled);
  r.constant("smooth.pooled_spread", pooled_spread);
  if (!(pooled_spread <= bound)) r.fail("pooled sup/min " + fmt(pooled_spread) + " exceeds " + fmt(bound));
  return r;
}

RunResult run_whitney(const Config& cfg) {
  RunResult r;
  const PhasePair p = cfg.phase();
  const OpenSet omega(cfg.intervals("whitney.omega"));
  const GrowthWitness w = witness_for(p, cfg);
  const long k_min = cfg.integer("whitney.k_min");
  const long k_max = cfg.integer("whitney.k_max");
  const long max_intervals = cfg.integer("whitney.max_intervals");
  const long max_rows = cfg.integer("whitney.max_rows");
  if (k_min < 0 || k_max < k_min) throw UsageError("need 0 <= whitney.k_min <= whitney.k_max");
  if (max_intervals < 1 || max_rows < 0) throw UsageError("whitney.max_intervals and whitney.max_rows must be positive");
  const WhitneyCover cover =
      whitney_cover(omega, p, w, {static_cast<int>(k_min), static_cast<int>(k_max)}, static_cast<std::size_t>(max_intervals));
  const CoverReport rep = verify_cover(cover, omega);

  r.table.columns = {"index", "k", "lo", "hi", "y", "star_lo", "star_hi", "dist", "rho", "clamped"};
  r.table.sources = {{"whitney_cover", "index,k,lo,hi,y,star_lo,star_hi,rho,clamped"},
                     {"distance_to_complement", "dist"}};
  const std::size_t rows = std::min(cover.size(), static_cast<std::size_t>(max_rows));
  for (std::size_t i = 0; i < rows; ++i) {
    const WhitneyEntry e = cover.entry(i);
    r.table.add_row({fmt(i), fmt(e.k), fmt(e.lo), fmt(e.hi), fmt(e.center), fmt(e.star_lo), fmt(e.star_hi),
                     fmt(omega.distance_to_complement(e.center)), fmt(e.rho), fmt_bool(e.clamped)});
  }
  add_witness_constants(r, w);
  r.constant("intervals", static_cast<double>(rep.intervals));
  r.constant("rows_written", static_cast<double>(rows));
  r.constant("clamped", static_cast<double>(rep.clamped));
  r.constant("uncovered_measure", rep.uncovered_measure);
  if (cover.size() == 0 && !omega.empty()) {
    r.fail("cover is empty for scales " + fmt(cover.k_range.k_min) + ".." + fmt(cover.k_range.k_max) +
           "; raise whitney.k_max");
  }
  for (const PropertyCheck& c : rep.checks) {
    r.constant("check." + c.name, c.value);
    r.constant("check." + c.name + ".bound", c.bound);
    if (!c.pass) {
      std::string why = "cover check " + c.name + " failed: value " + fmt(c.value) + ", bound " + fmt(c.bound);
      if (c.offending) why += ", first offending interval " + fmt(*c.offending);
      if (!c.note.empty()) why += " (" + c.note + ")";
      r.fail(std::move(why));
    }
  }
  return r;
}

struct CzRun {
  CZDecomposition dec;
  BadPartReport bad;
};

RunResult run_czsteps(const Config& cfg, int workers) {
  RunResult r;
  const PhasePair p = cfg.phase();
  const GrowthWitness w = witness_for(p, cfg);
  const std::vector<Input> inputs = make_inputs(cfg);
  const std::vector<double> betas = cfg.reals("kernel.beta");
  std::vector<KernelSpec> kernels;
  for (double b : betas) kernels.push_back(cfg.kernel(b));
  const QuadConfig q = cfg.quad();
  const double alpha = cfg.real("cz.alpha");
  if (!(alpha > 0.0)) throw UsageError("cz.alpha must be positive");
  CZOptions opt;
  if (auto k = cfg.auto_integer("cz.k_min")) opt.k_min = static_cast<int>(*k);
  if (auto k = cfg.auto_integer("cz.k_max")) opt.k_max = static_cast<int>(*k);

  const std::size_t per = betas.size();
  const auto runs = parallel_map<CzRun>(inputs.size() * per, workers, [&](std::size_t i) {
    const Input& in = inputs[i / per];
    CzRun run{cz_decompose(in.f, alpha, betas[i % per], p, w, opt), {}};
    run.bad = bad_part_estimate(kernels[i % per], run.dec, q);
    return run;
  });

  r.table.columns = {"input", "beta", "part", "k", "b_l1", "mollified_outside", "difference_outside",
                     "mollified_ratio", "difference_ratio"};
  r.table.sources = {{"cz_decompose", "input,beta,part,k"},
                     {"bad_part_estimate", "b_l1,mollified_outside,difference_outside,mollified_ratio,difference_ratio"}};
  add_witness_constants(r, w);
  for (std::size_t b = 0; b < per; ++b) {
    std::vector<double> kappas, kappa_primes;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const CzRun& run = runs[i * per + b];
      for (const BadPartTerm& t : run.bad.terms) {
        r.table.add_row({inputs[i].label, fmt(betas[b]), fmt(t.part), fmt(t.k), fmt(t.b_l1), fmt(t.mollified_outside),
                         fmt(t.difference_outside), fmt(t.mollified_ratio), fmt(t.difference_ratio)});
      }
      const std::string tag = inputs[i].label + "." + beta_tag(betas[b]);
      const CZDecomposition& d = run.dec;
      r.constant(tag + ".alpha_prime", d.alpha_prime);
      r.constant(tag + ".parts", static_cast<double>(d.bad_parts.size()));
      r.constant(tag + ".kappa", d.kappa);
      r.constant(tag + ".kappa_prime", d.kappa_prime);
      r.constant(tag + ".reconstruction", d.reconstruction_error);
      r.constant(tag + ".max_mean_ratio", d.max_mean_ratio);
      r.constant(tag + ".aggregate", run.bad.aggregate);
      r.constant(tag + ".aggregate_triangle", run.bad.aggregate_triangle);
      if (!(d.reconstruction_error <= 1e-12)) r.fail(tag + ": reconstruction error " + fmt(d.reconstruction_error));
      if (!(d.max_mean_ratio <= 1e-10)) r.fail(tag + ": bad-part mean ratio " + fmt(d.max_mean_ratio));
      if (!std::isfinite(run.bad.aggregate)) r.fail(tag + ": aggregate is not finite");
      if (d.bad_parts.empty() && !d.omega.empty()) {
        r.fail(tag + ": the level set is nonempty but no cover interval fits the grid; refine grid.n or lower cz.k_min");
      }
      kappas.push_back(d.kappa);
      if (!d.bad_parts.empty()) kappa_primes.push_back(d.kappa_prime);
    }
    if (inputs.size() > 1) {
      const double bound = cfg.real("check.cz_spread");
      const std::string tag = beta_tag(betas[b]);
      const double s1 = spread_of(kappas);
      const double s2 = spread_of(kappa_primes);
      r.constant(tag + ".kappa_spread", s1);
      r.constant(tag + ".kappa_prime_spread", s2);
      if (!(s1 <= bound)) r.fail(tag + ": kappa varies by " + fmt(s1) + " across inputs");
      if (!(s2 <= bound)) r.fail(tag + ": kappa' varies by " + fmt(s2) + " across inputs");
    }
  }
  return r;
}

RunResult run_weaktype(const Config& cfg, int workers) {
  RunResult r;
  const std::vector<Input> inputs = make_inputs(cfg);
  const std::vector<double> betas = cfg.reals("kernel.beta");
  std::vector<KernelSpec> kernels;
  for (double b : betas) kernels.push_back(cfg.kernel(b));
  const QuadConfig q = cfg.quad();
  const OperatorMethod method = method_of(cfg);
  const std::optional<std::vector<double>> grid = cfg.auto_reals("alpha.grid");
  if (grid) {
    for (double a : *grid)
      if (!(a > 0.0)) throw UsageError("alpha.grid entries must be positive");
  }
  const long points = cfg.integer("alpha.points");
  const double min_frac = cfg.real("alpha.min_frac");
  if (points < 2) throw UsageError("alpha.points must be at least 2");
  if (!(min_frac > 0.0 && min_frac < 1.0)) throw UsageError("alpha.min_frac must lie in (0, 1)");

  const std::size_t per = betas.size();
  const auto reports = parallel_map<WeakTypeReport>(inputs.size() * per, workers, [&](std::size_t i) {
    const Input& in = inputs[i / per];
    const OperatorResult tf = apply_operator(kernels[i % per], in.f, method, q, 1);
    if (!tf.converged) throw NotConverged("operator did not converge for " + in.label);
    const double sup = tf.tf.sup_norm();
    const auto alphas = grid ? *grid : default_alpha_grid(sup, static_cast<int>(points), min_frac);
    return weak_type_from(tf.tf, in.f.l1_norm(), betas[i % per], alphas);
  });

  r.table.columns = {"input", "beta", "alpha", "lambda", "scaled"};
  r.table.sources = {{"apply_operator", "input,beta"}, {"distribution_function", "alpha,lambda"},
                     {"weak_type_from", "scaled"}};
  std::vector<double> normalised;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t b = 0; b < per; ++b) {
      const WeakTypeReport& rep = reports[i * per + b];
      for (std::size_t j = 0; j < rep.alphas.size(); ++j) {
        r.table.add_row({inputs[i].label, fmt(betas[b]), fmt(rep.alphas[j]), fmt(rep.lambda[j]), fmt(rep.scaled[j])});
      }
      const std::string tag = inputs[i].label + "." + beta_tag(betas[b]);
      r.constant(tag + ".constant", rep.constant);
      r.constant(tag + ".normalised", rep.normalised);
      r.constant(tag + ".argmax_alpha", rep.argmax_alpha);
      r.constant(tag + ".tf_sup", rep.tf_sup);
      if (!rep.monotone) r.fail(tag + ": distribution function increases along the alpha grid");
      normalised.push_back(rep.normalised);
    }
  }
  const double spread = spread_of(normalised);
  const double bound = cfg.real("check.weak_spread");
  r.constant("weak.normalised_spread", spread);
  if (!(spread <= bound)) r.fail("normalised constants vary by " + fmt(spread) + " (bound " + fmt(bound) + ")");
  return r;
}

RunResult run_apply(const Config& cfg, int workers) {
  RunResult r;
  const std::vector<Input> inputs = make_inputs(cfg);
  const std::vector<double> betas = cfg.reals("kernel.beta");
  if (inputs.size() != 1 || betas.size() != 1) throw UsageError("apply takes exactly one input and one kernel.beta");
  const KernelSpec k = cfg.kernel(betas[0]);
  const OperatorMethod method = method_of(cfg);
  const OperatorResult res = apply_operator(k, inputs[0].f, method, cfg.quad(), workers);
  const bool direct = method == OperatorMethod::Direct;
  r.table.columns = {"x", "re", "im", "abs"};
  if (direct) r.table.columns.push_back("err");
  r.table.sources = {{std::string("apply_operator.") + std::string(to_string(method)),
                      direct ? "x,re,im,abs,err" : "x,re,im,abs"}};
  for (std::size_t i = 0; i < res.tf.size(); ++i) {
    const cdouble v = res.tf.samples[i];
    std::vector<std::string> row{fmt(res.tf.x(i)), fmt(v.real()), fmt(v.imag()), fmt(std::abs(v))};
    if (direct) row.push_back(fmt(res.point_err[i]));
    r.table.add_row(std::move(row));
  }
  r.constant("f_l1", inputs[0].f.l1_norm());
  r.constant("tf_sup", res.tf.sup_norm());
  r.constant("tf_l2", res.tf.l2_norm());
  if (!res.converged) r.fail("operator quadrature did not converge at some point");
  return r;
}

}  // namespace

const std::vector<std::pair<Command, std::string_view>>& command_names() {
  static const std::vector<std::pair<Command, std::string_view>> names = {
      {Command::Audit, "audit"},     {Command::Decay, "decay"},       {Command::Smooth, "smooth"},
      {Command::Whitney, "whitney"}, {Command::CzSteps, "czsteps"},   {Command::WeakType, "weaktype"},
      {Command::Apply, "apply"}};
  return names;
}

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : command_names())
    if (cmd == c) return name;
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (const auto& [cmd, n] : command_names())
    if (n == name) return cmd;
  throw UsageError("unknown command '" + std::string(name) + "'");
}

std::string_view describe(Command c) {
  switch (c) {
    case Command::Audit:
      return "Audit the phase pair against the admissibility conditions";
    case Command::Decay:
      return "Sweep the kernel transform over frequency and fit its decay";
    case Command::Smooth:
      return "Sweep the kernel smoothness integral over shifts";
    case Command::Whitney:
      return "Build and verify the interval cover of an open set";
    case Command::CzSteps:
      return "Decompose inputs and estimate the bad-part terms";
    case Command::WeakType:
      return "Estimate weak-type constants over inputs and modulations";
    case Command::Apply:
      return "Apply the truncated operator to one input";
  }
  return "";
}

void RunResult::fail(std::string why) {
  pass = false;
  failures.push_back(std::move(why));
}

void RunResult::constant(std::string name, double value) { constants.emplace_back(std::move(name), value); }

RunResult run_command(Command c, const Config& cfg, int workers) {
  const auto t0 = Clock::now();
  RunResult r;
  switch (c) {
    case Command::Audit:
      r = run_audit(cfg);
      break;
    case Command::Decay:
      r = run_decay(cfg, workers);
      break;
    case Command::Smooth:
      r = run_smooth(cfg, workers);
      break;
    case Command::Whitney:
      r = run_whitney(cfg);
      break;
    case Command::CzSteps:
      r = run_czsteps(cfg, workers);
      break;
    case Command::WeakType:
      r = run_weaktype(cfg, workers);
      break;
    case Command::Apply:
      r = run_apply(cfg, workers);
      break;
  }
  r.compute_seconds = seconds_since(t0);
  return r;
}

Artifacts artifact_paths(Command c, const Config& cfg) {
  const std::filesystem::path dir = cfg.text("output.dir").empty() ? "." : cfg.text("output.dir");
  const std::string stem = cfg.text("output.prefix").empty() ? std::string(to_string(c)) : cfg.text("output.prefix");
  return {dir / (stem + ".csv"), dir / (stem + ".json")};
}

HeaderBlock csv_header(Command c, const Config& cfg, const RunResult& r) {
  HeaderBlock h;
  h.emplace_back("schema_version", std::to_string(kSchemaVersion));
  h.emplace_back("command", std::string(to_string(c)));
  h.emplace_back("config_hash", cfg.hash_hex());
  h.emplace_back("oscsing_version", std::string(kVersion));
  h.emplace_back("pass", fmt_bool(r.pass));
  for (const auto& [name, v] : r.constants) h.emplace_back("constant." + name, fmt(v));
  for (std::size_t i = 0; i < r.failures.size(); ++i) h.emplace_back("failure." + std::to_string(i), r.failures[i]);
  for (const auto& [k, v] : cfg.values()) h.emplace_back("config." + k, v);
  return h;
}

std::string json_summary(Command c, const Config& cfg, const RunResult& r, const Artifacts& a,
                         double total_seconds) {
  nlohmann::ordered_json j;
  j["command"] = to_string(c);
  j["pass"] = r.pass;
  j["config_hash"] = cfg.hash_hex();
  j["schema_version"] = kSchemaVersion;
  j["version"] = kVersion;
  nlohmann::ordered_json constants = nlohmann::ordered_json::object();
  for (const auto& [name, v] : r.constants) {
    if (std::isfinite(v)) {
      constants[name] = v;
    } else {
      constants[name] = fmt(v);
    }
  }
  j["constants"] = constants;
  j["failures"] = r.failures;
  j["timings"] = {{"compute_s", r.compute_seconds}, {"total_s", total_seconds}};
  j["artifacts"] = {{"csv", a.csv.string()}, {"json", a.json.string()}};
  return j.dump(2) + "\n";
}

int execute(Command c, const Config& cfg, int workers, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  const std::string name(to_string(c));
  RunResult r;
  try {
    r = run_command(c, cfg, workers);
  } catch (const UsageError& e) {
    err << name << ": " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << name << ": invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << name << ": domain error: " << e.what() << '\n';
    return 2;
  } catch (const CoverageGap& e) {
    err << name << ": coverage gap: " << e.what() << '\n';
    return 2;
  } catch (const GridTooCoarse& e) {
    err << name << ": grid too coarse: " << e.what() << '\n';
    return 2;
  } catch (const InvalidWitness& e) {
    err << name << ": invalid witness: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << name << ": run failed: " << e.what() << '\n';
    return 1;
  }

  const Artifacts a = artifact_paths(c, cfg);
  try {
    std::filesystem::create_directories(a.csv.parent_path().empty() ? "." : a.csv.parent_path());
    std::ofstream csv(a.csv, std::ios::binary);
    if (!csv) throw UsageError("cannot write " + a.csv.string());
    write_csv(csv, csv_header(c, cfg, r), r.table);
    csv.close();
    if (!csv) throw UsageError("cannot write " + a.csv.string());
    std::ofstream json(a.json, std::ios::binary);
    if (!json) throw UsageError("cannot write " + a.json.string());
    json << json_summary(c, cfg, r, a, seconds_since(t0));
    json.close();
    if (!json) throw UsageError("cannot write " + a.json.string());
  } catch (const std::exception& e) {
    err << name << ": " << e.what() << '\n';
    return 2;
  }

  out << name << ": " << (r.pass ? "PASS" : "FAIL") << " (" << r.table.rows.size() << " rows, "
      << r.constants.size() << " constants, config " << cfg.hash_hex() << ")\n";
  for (const auto& f : r.failures) out << "  failed: " << f << '\n';
  out << "  csv:  " << a.csv.string() << '\n' << "  json: " << a.json.string() << '\n';
  return r.pass ? 0 : 1;
}

int workers_from_env() {
  const char* v = std::getenv("OSCSING_WORKERS");
  if (v == nullptr || *v == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) throw UsageError(std::string("OSCSING_WORKERS must be a positive integer, got '") + v + "'");
  return static_cast<int>(n);
}

}  // namespace oscsing::cli
