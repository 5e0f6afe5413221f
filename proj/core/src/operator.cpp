#include "oscsing/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "oscsing/errors.hpp"

namespace oscsing {

namespace {

cdouble kernel_amplitude(const KernelSpec& k, double t) {
  if (k.beta == 0.0) return {1.0 / t, 0.0};
  const double m = k.beta * (k.phase.log_psi(t) - std::log(t));
  return cdouble(std::cos(m), std::sin(m)) / t;
}

std::size_t output_length(const SampledFunction& f) {
  return f.size() + static_cast<std::size_t>(std::ceil(1.0 / f.h)) + 2;
}

template <typename F>
void parallel_for(std::size_t n, int workers, F&& body) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(workers)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

void require_fine_grid(const KernelSpec& k, double h) {
  if (h > k.eps / 10.0 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "grid spacing " << h << " exceeds eps / 10 = " << k.eps / 10.0;
    throw GridTooCoarse(os.str());
  }
}

}  // namespace

std::string_view to_string(OperatorMethod m) { return m == OperatorMethod::Direct ? "direct" : "fast"; }

std::vector<cdouble> hat_weights(const KernelSpec& k, double h, const QuadConfig& cfg) {
  k.validate();
  if (!(h > 0.0)) throw std::invalid_argument("hat_weights needs h > 0");
  const auto count = static_cast<std::size_t>(std::ceil(1.0 / h)) + 2;
  std::vector<cdouble> w(count, cdouble{});
  // A piece is one grid cell wide, so a short scan finds any stationary point.
  QuadConfig piece_cfg = cfg;
  piece_cfg.stationary_seeds = std::min(cfg.stationary_seeds, 8);
  const RealMap phase = [&](double t) { return k.phase.gamma(t); };
  const RealMap dphase = [&](double t) { return k.phase.gamma1(t); };
  for (std::size_t m = 0; m < count; ++m) {
    const double md = static_cast<double>(m);
    const double pieces[2][2] = {{(md - 1.0) * h, md * h}, {md * h, (md + 1.0) * h}};
    for (int s = 0; s < 2; ++s) {
      const double u = std::max(pieces[s][0], k.eps);
      const double v = std::min(pieces[s][1], 1.0);
      if (!(u < v)) continue;
      const ComplexMap amp = [&, s](double t) {
        const double hat = s == 0 ? t / h - (md - 1.0) : (md + 1.0) - t / h;
        return kernel_amplitude(k, t) * hat;
      };
      const QuadResult r = integrate_oscillatory(amp, phase, dphase, u, v, piece_cfg);
      require_converged(r, "hat weight");
      w[m] += r.value;
    }
  }
  return w;
}

OperatorResult apply_operator(const KernelSpec& k, const SampledFunction& f, OperatorMethod method,
                              const QuadConfig& cfg, int workers) {
  k.validate();
  f.validate();
  OperatorResult res;
  res.method = method;
  const std::size_t n_out = output_length(f);
  res.tf = SampledFunction::zeros(f.x0, f.h, n_out);
  if (f.empty()) return res;

  if (method == OperatorMethod::Fast) {
    require_fine_grid(k, f.h);
    const auto w = hat_weights(k, f.h, cfg);
    const auto conv = detail::fft_convolve(f.samples, w);
    for (std::size_t i = 0; i < n_out && i < conv.size(); ++i) res.tf.samples[i] = conv[i];
    return res;
  }

  // Nonzero window of the samples; the interpolant vanishes outside
  // (x_{j_lo - 1}, x_{j_hi + 1}).
  std::size_t j_lo = f.size();
  std::size_t j_hi = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f.samples[j] != cdouble(0.0, 0.0)) {
      j_lo = std::min(j_lo, j);
      j_hi = j;
    }
  }
  res.point_err.assign(n_out, 0.0);
  if (j_lo > j_hi) return res;

  const double h = f.h;
  auto interp = [&](double x) -> cdouble {
    const double u = (x - f.x0) / h;
    if (!(u > -1.0) || !(u < static_cast<double>(f.size()))) return {};
    const double fl = std::floor(u);
    const double frac = u - fl;
    const auto j = static_cast<std::ptrdiff_t>(fl);
    const cdouble left = j >= 0 ? f.samples[static_cast<std::size_t>(j)] : cdouble{};
    const cdouble right =
        j + 1 < static_cast<std::ptrdiff_t>(f.size()) ? f.samples[static_cast<std::size_t>(j + 1)] : cdouble{};
    return left * (1.0 - frac) + right * frac;
  };
  const RealMap phase = [&](double t) { return k.phase.gamma(t); };
  const RealMap dphase = [&](double t) { return k.phase.gamma1(t); };
  const double support_lo = f.x0 + (static_cast<double>(j_lo) - 1.0) * h;
  const double support_hi = f.x0 + (static_cast<double>(j_hi) + 1.0) * h;

  std::vector<char> ok(n_out, 1);
  parallel_for(n_out, workers, [&](std::size_t i) {
    const double x = res.tf.x(i);
    const double a = std::max(k.eps, x - support_hi);
    const double b = std::min(1.0, x - support_lo);
    if (!(a < b)) return;
    std::vector<double> cuts;
    const double jfirst = std::ceil((x - b - f.x0) / h);
    const double jlast = std::floor((x - a - f.x0) / h);
    for (double j = jfirst; j <= jlast; j += 1.0) cuts.push_back(x - (f.x0 + j * h));
    const ComplexMap amp = [&](double t) { return kernel_amplitude(k, t) * interp(x - t); };
    const QuadResult r = integrate_oscillatory(amp, phase, dphase, a, b, cfg, cuts);
    res.tf.samples[i] = r.value;
    res.point_err[i] = r.err_estimate;
    ok[i] = r.converged ? 1 : 0;
  });
  res.converged = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  return res;
}

double distribution_function(const SampledFunction& g, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("distribution function needs alpha > 0");
  std::size_t c = 0;
  for (const cdouble& v : g.samples)
    if (std::abs(v) > alpha) ++c;
  return g.h * static_cast<double>(c);
}

std::vector<double> default_alpha_grid(double tf_sup, int points, double min_frac) {
  std::vector<double> a;
  if (!(tf_sup > 0.0) || points < 1) return a;
  if (points == 1) return {tf_sup};
  const double l0 = std::log(min_frac * tf_sup);
  const double l1 = std::log(tf_sup);
  for (int i = 0; i < points; ++i) a.push_back(std::exp(l0 + (l1 - l0) * i / (points - 1)));
  return a;
}

WeakTypeReport weak_type_from(const SampledFunction& tf, double f_l1, double beta,
                              std::optional<std::vector<double>> alphas) {
  WeakTypeReport rep;
  rep.f_l1 = f_l1;
  rep.tf_sup = tf.sup_norm();
  if (alphas) {
    if (alphas->empty()) throw std::invalid_argument("alpha grid is empty");
    for (double a : *alphas)
      if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("alpha grid must be positive");
    rep.alphas = *alphas;
  } else {
    rep.alphas = default_alpha_grid(rep.tf_sup);
  }
  std::sort(rep.alphas.begin(), rep.alphas.end());

  // Counting against sorted magnitudes keeps this O(n log n) for any grid.
  std::vector<double> mags(tf.size());
  for (std::size_t i = 0; i < tf.size(); ++i) mags[i] = std::abs(tf.samples[i]);
  std::sort(mags.begin(), mags.end());
  for (double a : rep.alphas) {
    const auto above = static_cast<double>(mags.end() - std::upper_bound(mags.begin(), mags.end(), a));
    const double lam = tf.h * above;
    if (!rep.lambda.empty() && lam > rep.lambda.back()) rep.monotone = false;
    rep.lambda.push_back(lam);
    const double s = f_l1 > 0.0 ? a * lam / f_l1 : 0.0;
    rep.scaled.push_back(s);
    if (s > rep.constant) {
      rep.constant = s;
      rep.argmax_alpha = a;
    }
  }
  rep.normalised = rep.constant / (1.0 + std::fabs(beta));
  return rep;
}

WeakTypeReport weak_type_constant(const KernelSpec& k, const SampledFunction& f,
                                  std::optional<std::vector<double>> alphas, OperatorMethod method,
                                  const QuadConfig& cfg, int workers) {
  if (alphas && alphas->empty()) throw std::invalid_argument("alpha grid is empty");
  const OperatorResult tf = apply_operator(k, f, method, cfg, workers);
  WeakTypeReport rep = weak_type_from(tf.tf, f.l1_norm(), k.beta, std::move(alphas));
  rep.method = method;
  return rep;
}

BadPartReport bad_part_estimate(const KernelSpec& k, const CZDecomposition& dec, const QuadConfig& cfg) {
  BadPartReport rep;
  if (dec.bad_parts.empty()) return rep;
  k.validate();
  const double h = dec.g.h;
  require_fine_grid(k, h);
  const auto w = hat_weights(k, h, cfg);
  const double x0 = dec.g.x0;
  const double norm = (1.0 + std::fabs(k.beta));

  auto index_of = [&](double x) { return static_cast<std::ptrdiff_t>(std::llround((x - x0) / h)); };

  // Global index window holding every convolution output.
  std::ptrdiff_t g_lo = 0;
  std::ptrdiff_t g_hi = 0;
  bool any = false;
  for (const BadPart& p : dec.bad_parts) {
    if (!p.mollified) continue;
    const std::ptrdiff_t o = index_of(p.mollified->x0);
    const std::ptrdiff_t e = o + static_cast<std::ptrdiff_t>(p.mollified->size() + w.size());
    g_lo = any ? std::min(g_lo, o) : o;
    g_hi = any ? std::max(g_hi, e) : e;
    any = true;
  }
  if (!any) return rep;
  std::vector<cdouble> total(static_cast<std::size_t>(g_hi - g_lo), cdouble{});
  std::size_t longest = 0;
  for (const BadPart& p : dec.bad_parts)
    if (p.mollified) longest = std::max(longest, p.mollified->size());
  const detail::Convolver conv(w, longest);

  std::vector<Interval> triple;
  for (const BadPart& p : dec.bad_parts) {
    const double y = 0.5 * (p.star.lo + p.star.hi);
    const double r = 1.5 * p.star.length();
    triple.push_back({y - r, y + r});
  }

  for (std::size_t pi = 0; pi < dec.bad_parts.size(); ++pi) {
    const BadPart& p = dec.bad_parts[pi];
    if (!p.mollified) continue;
    const SampledFunction& bt = *p.mollified;
    const std::ptrdiff_t o = index_of(bt.x0);
    const std::ptrdiff_t ob = index_of(p.b.x0) - o;

    std::vector<cdouble> diff = bt.samples;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = -diff[i];
    for (std::size_t i = 0; i < p.b.size(); ++i) diff[static_cast<std::size_t>(ob) + i] += p.b.samples[i];

    const auto conv_m = conv.apply(bt.samples);
    const auto conv_d = conv.apply(diff);
    const Interval& t3 = triple[pi];

    BadPartTerm term;
    term.part = pi;
    term.k = p.k;
    term.b_l1 = p.l1;
    for (std::size_t i = 0; i < conv_m.size(); ++i) {
      const double x = bt.x0 + h * static_cast<double>(i);
      total[static_cast<std::size_t>(o - g_lo) + i] += conv_m[i];
      if (x >= t3.lo && x <= t3.hi) continue;
      term.mollified_outside += h * std::abs(conv_m[i]);
      term.difference_outside += h * std::abs(conv_d[i]);
    }
    if (p.l1 > 0.0) {
      term.mollified_ratio = term.mollified_outside / (norm * p.l1);
      term.difference_ratio = term.difference_outside / (norm * p.l1);
    }
    rep.aggregate_triangle += term.mollified_outside;
    rep.terms.push_back(term);
  }

  std::sort(triple.begin(), triple.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double outside = 0.0;
  std::size_t ti = 0;
  double reach = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < total.size(); ++i) {
    const double x = x0 + h * static_cast<double>(g_lo + static_cast<std::ptrdiff_t>(i));
    while (ti < triple.size() && triple[ti].lo <= x) reach = std::max(reach, triple[ti++].hi);
    if (x <= reach) continue;
    outside += h * std::abs(total[i]);
  }
  const double denom = norm * dec.f_l1;
  rep.aggregate = denom > 0.0 ? outside / denom : 0.0;
  rep.aggregate_triangle = denom > 0.0 ? rep.aggregate_triangle / denom : 0.0;
  return rep;
}

}  // namespace oscsing
