#include <algorithm>
#include <array>
#include <cmath>

#include "panel_rules.hpp"

namespace oscsing {

namespace {

// QUADPACK qk15 abscissae and weights; xgk[1], xgk[3], xgk[5], xgk[7] are the
// Gauss nodes.
constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr int kN = 15;
constexpr int kG = 7;

// Nodes in ascending order; the Gauss nodes sit at odd positions.
struct Tables {
  std::array<double, kN> x{};
  std::array<double, kN> wk{};
  std::array<double, kG> wgauss{};
  // Legendre coefficients of the degree-14 interpolant: c = vinv * g.
  std::array<std::array<double, kN>, kN> vinv{};
  // Legendre coefficients of the degree-6 Gauss interpolant.
  std::array<std::array<double, kG>, kG> b7{};
};

void legendre(int n, long double x, long double* p) {
  p[0] = 1.0L;
  if (n > 0) p[1] = x;
  for (int m = 1; m < n; ++m) p[m + 1] = ((2 * m + 1) * x * p[m] - m * p[m - 1]) / (m + 1);
}

Tables build_tables() {
  Tables t;
  for (int k = 0; k < 7; ++k) {
    t.x[k] = -xgk[k];
    t.wk[k] = wgk[k];
    t.x[kN - 1 - k] = xgk[k];
    t.wk[kN - 1 - k] = wgk[k];
  }
  t.x[7] = 0.0;
  t.wk[7] = wgk[7];
  for (int j = 0; j < kG; ++j) t.wgauss[j] = wg[j < 4 ? j : 6 - j];

  // Invert V[k][m] = P_m(x_k) by Gauss-Jordan in extended precision.
  long double a[kN][2 * kN];
  for (int k = 0; k < kN; ++k) {
    long double p[kN];
    legendre(kN - 1, t.x[k], p);
    for (int m = 0; m < kN; ++m) {
      a[k][m] = p[m];
      a[k][kN + m] = (k == m) ? 1.0L : 0.0L;
    }
  }
  for (int c = 0; c < kN; ++c) {
    int piv = c;
    for (int r = c + 1; r < kN; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    if (piv != c)
      for (int m = 0; m < 2 * kN; ++m) std::swap(a[c][m], a[piv][m]);
    const long double d = a[c][c];
    for (int m = 0; m < 2 * kN; ++m) a[c][m] /= d;
    for (int r = 0; r < kN; ++r) {
      if (r == c) continue;
      const long double f = a[r][c];
      if (f == 0.0L) continue;
      for (int m = 0; m < 2 * kN; ++m) a[r][m] -= f * a[c][m];
    }
  }
  // a[.][kN..] now holds V^{-1}, mapping node values to coefficients.
  for (int m = 0; m < kN; ++m)
    for (int k = 0; k < kN; ++k) t.vinv[m][k] = static_cast<double>(a[m][kN + k]);

  for (int j = 0; j < kG; ++j) {
    long double p[kG];
    legendre(kG - 1, t.x[2 * j + 1], p);
    for (int m = 0; m < kG; ++m)
      t.b7[m][j] = static_cast<double>((2 * m + 1) / 2.0L * t.wgauss[j] * p[m]);
  }
  return t;
}

const Tables& tables() {
  static const Tables t = build_tables();
  return t;
}

void bessel_series(int m_max, double x, double* out) {
  const double q = -0.5 * x * x;
  double lead = 1.0;  // x^m / (2m+1)!!
  for (int m = 0; m <= m_max; ++m) {
    if (m > 0) lead *= x / (2 * m + 1);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 40; ++k) {
      term *= q / (k * (2.0 * m + 2.0 * k + 1.0));
      sum += term;
      if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    out[m] = lead * sum;
  }
}

}  // namespace

namespace detail {

void spherical_bessel(int m_max, double x, double* out) {
  if (x < 0.0) {
    spherical_bessel(m_max, -x, out);
    for (int m = 1; m <= m_max; m += 2) out[m] = -out[m];
    return;
  }
  if (x == 0.0) {
    out[0] = 1.0;
    for (int m = 1; m <= m_max; ++m) out[m] = 0.0;
    return;
  }
  if (x < 0.5) {
    bessel_series(m_max, x, out);
    return;
  }
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double j0 = s / x;
  const double j1 = s / (x * x) - c / x;
  if (x >= m_max + 1.0) {
    out[0] = j0;
    if (m_max >= 1) out[1] = j1;
    for (int m = 1; m < m_max; ++m) out[m + 1] = (2 * m + 1) / x * out[m] - out[m - 1];
    return;
  }
  // Miller's backward recurrence, normalised against whichever of j0, j1 is
  // further from a zero.
  const int start = m_max + 30 + static_cast<int>(x);
  double jp1 = 0.0;
  double jm = 1e-30;
  for (int m = start; m >= 1; --m) {
    const double jm1 = (2 * m + 1) / x * jm - jp1;
    jp1 = jm;
    jm = jm1;
    if (m - 1 <= m_max) out[m - 1] = jm;
    if (std::fabs(jm) > 1e250) {
      jm *= 1e-250;
      jp1 *= 1e-250;
      for (int k = std::max(0, m - 1); k <= m_max; ++k) out[k] *= 1e-250;
    }
  }
  const double scale = std::fabs(j0) >= std::fabs(j1) ? j0 / out[0] : j1 / out[1];
  for (int m = 0; m <= m_max; ++m) out[m] *= scale;
}

PanelEstimate gk15_panel(const ComplexMap& f, double a, double b) {
  const Tables& t = tables();
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  cdouble rk{0.0, 0.0};
  cdouble rg{0.0, 0.0};
  for (int k = 0; k < kN; ++k) {
    const cdouble v = f(c + hw * t.x[k]);
    rk += t.wk[k] * v;
    if (k % 2 == 1) rg += t.wgauss[k / 2] * v;
  }
  rk *= hw;
  rg *= hw;
  return {rk, std::abs(rk - rg)};
}

PanelEstimate filon_panel(const ComplexMap& amp, const RealMap& phase, const RealMap& dphase,
                          double a, double b) {
  const Tables& t = tables();
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  const double pc = phase(c);
  const double dpc = dphase(c);

  std::array<cdouble, kN> g;
  for (int k = 0; k < kN; ++k) {
    const double off = hw * t.x[k];
    const double tk = c + off;
    const double r = phase(tk) - pc - dpc * off;
    g[k] = amp(tk) * cdouble(std::cos(r), std::sin(r));
  }

  const double omega = dpc * hw;
  double jm[kN];
  spherical_bessel(kN - 1, omega, jm);
  // Moments of P_m against exp(i omega x) on [-1, 1]: 2 i^m j_m(omega).
  std::array<cdouble, kN> mu;
  for (int m = 0; m < kN; ++m) {
    const double v = 2.0 * jm[m];
    switch (m % 4) {
      case 0: mu[m] = {v, 0.0}; break;
      case 1: mu[m] = {0.0, v}; break;
      case 2: mu[m] = {-v, 0.0}; break;
      default: mu[m] = {0.0, -v}; break;
    }
  }

  cdouble i15{0.0, 0.0};
  for (int m = 0; m < kN; ++m) {
    cdouble cm{0.0, 0.0};
    for (int k = 0; k < kN; ++k) cm += t.vinv[m][k] * g[k];
    i15 += cm * mu[m];
  }
  cdouble i7{0.0, 0.0};
  for (int m = 0; m < kG; ++m) {
    cdouble cm{0.0, 0.0};
    for (int j = 0; j < kG; ++j) cm += t.b7[m][j] * g[2 * j + 1];
    i7 += cm * mu[m];
  }
  const cdouble carrier = hw * cdouble(std::cos(pc), std::sin(pc));
  i15 *= carrier;
  i7 *= carrier;
  return {i15, std::abs(i15 - i7)};
}

double residual_phase(const RealMap& phase, const RealMap& dphase, double a, double b) {
  const double c = 0.5 * (a + b);
  const double pc = phase(c);
  const double dpc = dphase(c);
  const double ra = phase(a) - pc - dpc * (a - c);
  const double rb = phase(b) - pc - dpc * (b - c);
  return std::max(std::fabs(ra), std::fabs(rb));
}

}  // namespace detail

}  // namespace oscsing
