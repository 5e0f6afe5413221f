#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "oscsing/decomposition.hpp"
#include "oscsing/errors.hpp"
#include "oscsing/quadrature.hpp"

namespace oscsing {

namespace {

double bump(double x) { return std::fabs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }

// 1 / int_{-1}^{1} exp(-1 / (1 - x^2)) dx.
double bump_normaliser() {
  static const double c = [] {
    QuadConfig cfg;
    cfg.abs_tol = 1e-15;
    cfg.rel_tol = 1e-14;
    const auto r = integrate_adaptive([](double x) { return cdouble(bump(x), 0.0); }, -1.0, 1.0, cfg);
    return 1.0 / r.value.real();
  }();
  return c;
}

}  // namespace

SampledFunction mollify(const SampledFunction& b, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("mollifier scale must be > 0");
  if (b.h > scale / 8.0) {
    std::ostringstream os;
    os << "grid spacing " << b.h << " exceeds scale / 8 = " << scale / 8.0;
    throw GridTooCoarse(os.str());
  }
  const auto J = static_cast<std::ptrdiff_t>(std::ceil(scale / b.h));
  std::vector<double> taps(static_cast<std::size_t>(2 * J + 1));
  const double c = bump_normaliser();
  double mass = 0.0;
  for (std::ptrdiff_t j = -J; j <= J; ++j) {
    const double v = c * bump(static_cast<double>(j) * b.h / scale) / scale;
    taps[static_cast<std::size_t>(j + J)] = v;
    mass += v;
  }
  mass *= b.h;
  for (double& t : taps) t = t / mass * b.h;  // h * phi_k(j h), unit sum

  SampledFunction out = SampledFunction::zeros(b.x0 - static_cast<double>(J) * b.h, b.h,
                                               b.size() + static_cast<std::size_t>(2 * J));
  for (std::size_t i = 0; i < b.size(); ++i) {
    const cdouble v = b.samples[i];
    if (v == cdouble(0.0, 0.0)) continue;
    for (std::size_t t = 0; t < taps.size(); ++t) out.samples[i + t] += taps[t] * v;
  }
  return out;
}

CZDecomposition cz_decompose(const SampledFunction& f, double alpha, double beta, const PhasePair& p,
                             const GrowthWitness& w, const CZOptions& opt) {
  f.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("cz_decompose needs alpha > 0");
  w.validate();

  CZDecomposition dec;
  dec.alpha = alpha;
  dec.beta = beta;
  dec.alpha_prime = alpha / (1.0 + std::fabs(beta));
  dec.f_l1 = f.l1_norm();

  const MaximalResult mf = maximal_function(f, opt.exact_threshold);
  dec.maximal_mode = mf.mode;
  dec.omega = superlevel_set(mf.mf, dec.alpha_prime);

  std::vector<cdouble> r = f.samples;
  if (!dec.omega.empty()) {
    const int k_max = opt.k_max.value_or(static_cast<int>(std::floor(std::log2(1.0 / (8.0 * f.h)))));
    const int k_min = opt.k_min.value_or(default_k_min(dec.omega, p, w));
    if (k_min <= k_max) {
      dec.cover = whitney_cover(dec.omega, p, w, {k_min, k_max}, opt.max_parts);
    } else {
      dec.cover = WhitneyCover{p, w, {k_min, k_max}, {}, dec.omega.measure()};
    }

    const std::size_t n = f.size();
    std::size_t index = 0;
    for (const WhitneyRun& run : dec.cover->runs) {
      for (std::int64_t m = run.m_first; m <= run.m_last; ++m, ++index) {
        const double y = run.center(m);
        const double s_lo = y - run.star_radius;
        const double s_hi = y + run.star_radius;
        const double i1d = std::max(0.0, std::ceil((s_lo - f.x0) / f.h));
        const double i2d = std::min(static_cast<double>(n) - 1.0, std::floor((s_hi - f.x0) / f.h));
        if (i1d > i2d) continue;
        const auto i1 = static_cast<std::size_t>(i1d);
        const auto i2 = static_cast<std::size_t>(i2d);

        const auto count = static_cast<double>(i2 - i1 + 1);
        cdouble sum{0.0, 0.0};
        for (std::size_t i = i1; i <= i2; ++i) sum += r[i];
        const cdouble avg = sum / count;
        // avg carries a rounding error at the scale of r, which can dwarf b
        // when r is nearly constant on the window. Removing the residual mean
        // of the differences puts the mean of b at the rounding level of b.
        cdouble drift{0.0, 0.0};
        for (std::size_t i = i1; i <= i2; ++i) drift += r[i] - avg;
        drift /= count;

        BadPart part;
        part.cover_index = index;
        part.k = run.k;
        part.interval = {run.lo(m), run.hi(m)};
        part.star = {s_lo, s_hi};
        part.mean_removed = std::abs(avg + drift);
        part.b = SampledFunction::zeros(f.x(i1), f.h, i2 - i1 + 1);
        for (std::size_t i = i1; i <= i2; ++i) {
          const cdouble b = (r[i] - avg) - drift;
          part.b.samples[i - i1] = b;
          r[i] -= b;
        }
        part.l1 = part.b.l1_norm();
        if (part.star.length() <= 1.0) part.mollified = mollify(part.b, part.interval.length());
        dec.bad_parts.push_back(std::move(part));
      }
    }
  }

  dec.g = SampledFunction{f.x0, f.h, std::move(r)};
  dec.kappa = dec.g.sup_norm() / dec.alpha_prime;

  double bad_l1 = 0.0;
  std::vector<cdouble> rebuilt = dec.g.samples;
  for (const BadPart& part : dec.bad_parts) {
    bad_l1 += part.l1;
    const auto off = static_cast<std::size_t>(std::llround((part.b.x0 - f.x0) / f.h));
    for (std::size_t i = 0; i < part.b.size(); ++i) rebuilt[off + i] += part.b.samples[i];
    if (part.l1 > 0.0) {
      dec.max_mean_ratio = std::max(dec.max_mean_ratio, std::abs(part.b.integral()) / part.l1);
    }
  }
  dec.kappa_prime = dec.f_l1 > 0.0 ? bad_l1 / dec.f_l1 : 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < rebuilt.size(); ++i) err = std::max(err, std::abs(rebuilt[i] - f.samples[i]));
  const double fmax = f.sup_norm();
  dec.reconstruction_error = fmax > 0.0 ? err / fmax : err;
  return dec;
}

}  // namespace oscsing
