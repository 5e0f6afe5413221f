#include "oscsing/phase.hpp"

#include <cmath>
#include <sstream>

#include "oscsing/errors.hpp"

namespace oscsing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::function<double(double)>& custom_map(const CustomMaps& m, Derivative d) {
  switch (d) {
    case Derivative::Gamma: return m.gamma;
    case Derivative::Gamma1: return m.gamma1;
    case Derivative::Gamma2: return m.gamma2;
    case Derivative::Gamma3: return m.gamma3;
    case Derivative::Psi: return m.psi;
    case Derivative::Psi1: return m.psi1;
  }
  return m.gamma;
}

}  // namespace

std::string_view to_string(Derivative d) {
  switch (d) {
    case Derivative::Gamma: return "gamma";
    case Derivative::Gamma1: return "gamma'";
    case Derivative::Gamma2: return "gamma''";
    case Derivative::Gamma3: return "gamma'''";
    case Derivative::Psi: return "psi";
    case Derivative::Psi1: return "psi'";
  }
  return "?";
}

std::string_view to_string(PhaseFamily f) {
  switch (f) {
    case PhaseFamily::Power: return "power";
    case PhaseFamily::ExpFlat: return "expflat";
    case PhaseFamily::Custom: return "custom";
  }
  return "?";
}

SignedLog SignedLog::of(double v) {
  if (v == 0.0) return {};
  if (std::isnan(v)) return {1, std::numeric_limits<double>::quiet_NaN()};
  return {v > 0 ? 1 : -1, std::log(std::fabs(v))};
}

bool operator<(const SignedLog& a, const SignedLog& b) {
  if (a.sign != b.sign) return a.sign < b.sign;
  if (a.sign == 0) return false;
  return a.sign > 0 ? a.log_abs < b.log_abs : a.log_abs > b.log_abs;
}

bool operator==(const SignedLog& a, const SignedLog& b) {
  return a.sign == b.sign && (a.sign == 0 || a.log_abs == b.log_abs);
}

PhasePair PhasePair::power(double sigma) {
  if (!(sigma > 1.0) || !std::isfinite(sigma)) {
    throw DomainError("Power family requires sigma > 1");
  }
  PhasePair p;
  p.family_ = PhaseFamily::Power;
  p.sigma_ = sigma;
  p.t0_ = 1.0;
  p.s0_ = sigma - 1.0;
  return p;
}

PhasePair PhasePair::exp_flat() {
  PhasePair p;
  p.family_ = PhaseFamily::ExpFlat;
  p.sigma_ = 0.0;
  p.t0_ = 1.0;
  p.s0_ = std::exp(1.0);
  return p;
}

PhasePair PhasePair::custom(CustomMaps maps, double t0, std::optional<double> s0,
                            std::string name) {
  if (!maps.gamma || !maps.gamma1 || !maps.gamma2 || !maps.gamma3 || !maps.psi ||
      !maps.psi1) {
    throw std::invalid_argument("custom phase pair needs all six maps");
  }
  if (!(t0 > 0.0 && t0 <= 1.0)) throw DomainError("t0 must lie in (0, 1]");
  PhasePair p;
  p.family_ = PhaseFamily::Custom;
  p.t0_ = t0;
  p.name_ = std::move(name);
  p.maps_ = std::make_shared<const CustomMaps>(std::move(maps));
  p.s0_ = s0 ? *s0 : p.maps_->gamma1(1.0);
  return p;
}

std::string PhasePair::name() const {
  switch (family_) {
    case PhaseFamily::Power: {
      std::ostringstream os;
      os << "power(" << sigma_ << ")";
      return os.str();
    }
    case PhaseFamily::ExpFlat: return "expflat";
    case PhaseFamily::Custom: return name_;
  }
  return {};
}

double PhasePair::eval(Derivative which, double t) const {
  if (!(t > 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << to_string(which) << " evaluated at t = " << t << " outside (0, 1]";
    throw DomainError(os.str());
  }
  return value(which, t);
}

double PhasePair::value(Derivative which, double t) const {
  switch (family_) {
    case PhaseFamily::Power: {
      const double s = sigma_;
      switch (which) {
        case Derivative::Gamma: return -std::pow(t, 1.0 - s);
        case Derivative::Gamma1: return (s - 1.0) * std::pow(t, -s);
        case Derivative::Gamma2: return -s * (s - 1.0) * std::pow(t, -s - 1.0);
        case Derivative::Gamma3: return s * (s - 1.0) * (s + 1.0) * std::pow(t, -s - 2.0);
        case Derivative::Psi: return std::pow(t, 0.5 * (s + 1.0));
        case Derivative::Psi1: return 0.5 * (s + 1.0) * std::pow(t, 0.5 * (s - 1.0));
      }
      break;
    }
    case PhaseFamily::ExpFlat: {
      const double e = std::exp(1.0 / t);
      const double t2 = t * t;
      switch (which) {
        case Derivative::Gamma: return -e;
        case Derivative::Gamma1: return e / t2;
        case Derivative::Gamma2: return -e * (1.0 + 2.0 * t) / (t2 * t2);
        case Derivative::Gamma3: return e * (1.0 + 6.0 * t + 6.0 * t2) / (t2 * t2 * t2);
        case Derivative::Psi: return t * std::sqrt(t) * std::exp(-0.5 / t);
        case Derivative::Psi1:
          return t * std::sqrt(t) * std::exp(-0.5 / t) * (1.0 + 3.0 * t) / (2.0 * t2);
      }
      break;
    }
    case PhaseFamily::Custom: return custom_map(*maps_, which)(t);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SignedLog PhasePair::log_value(Derivative which, double t) const {
  const double lt = std::log(t);
  switch (family_) {
    case PhaseFamily::Power: {
      const double s = sigma_;
      switch (which) {
        case Derivative::Gamma: return {-1, (1.0 - s) * lt};
        case Derivative::Gamma1: return {1, std::log(s - 1.0) - s * lt};
        case Derivative::Gamma2: return {-1, std::log(s * (s - 1.0)) - (s + 1.0) * lt};
        case Derivative::Gamma3:
          return {1, std::log(s * (s - 1.0) * (s + 1.0)) - (s + 2.0) * lt};
        case Derivative::Psi: return {1, 0.5 * (s + 1.0) * lt};
        case Derivative::Psi1: return {1, std::log(0.5 * (s + 1.0)) + 0.5 * (s - 1.0) * lt};
      }
      break;
    }
    case PhaseFamily::ExpFlat: {
      const double it = 1.0 / t;
      switch (which) {
        case Derivative::Gamma: return {-1, it};
        case Derivative::Gamma1: return {1, it - 2.0 * lt};
        case Derivative::Gamma2: return {-1, it + std::log1p(2.0 * t) - 4.0 * lt};
        case Derivative::Gamma3:
          return {1, it + std::log(1.0 + 6.0 * t + 6.0 * t * t) - 6.0 * lt};
        case Derivative::Psi: return {1, 1.5 * lt - 0.5 * it};
        case Derivative::Psi1:
          return {1, 1.5 * lt - 0.5 * it + std::log((1.0 + 3.0 * t) / (2.0 * t * t))};
      }
      break;
    }
    case PhaseFamily::Custom: return SignedLog::of(custom_map(*maps_, which)(t));
  }
  return {};
}

double PhasePair::log_psi(double t) const {
  switch (family_) {
    case PhaseFamily::Power: return 0.5 * (sigma_ + 1.0) * std::log(t);
    case PhaseFamily::ExpFlat: return 1.5 * std::log(t) - 0.5 / t;
    case PhaseFamily::Custom: return std::log(maps_->psi(t));
  }
  return 0.0;
}

InverseResult PhasePair::gamma_prime_inverse(double s) const {
  if (!(s > 0.0)) return {1.0, true};
  if (std::isinf(s)) return {0.0, false};
  return gamma_prime_inverse_log(std::log(s));
}

InverseResult PhasePair::gamma_prime_inverse_log(double log_s) const {
  const auto h = [this](double t) { return log_value(Derivative::Gamma1, t).log_abs; };
  const double h1 = h(1.0);
  if (!(log_s > h1)) return {1.0, true};

  if (family_ == PhaseFamily::Power) {
    return {std::exp((std::log(sigma_ - 1.0) - log_s) / sigma_), false};
  }

  // Bracket in u = ln t by doubling, then bisect in t to full precision.
  // h is decreasing in t, so h(lo) >= log_s > h(hi).
  double u_lo = -1.0;
  while (h(std::exp(u_lo)) < log_s) {
    u_lo *= 2.0;
    if (u_lo < -700.0) return {std::exp(-700.0), false};
  }
  double lo = std::exp(u_lo);
  double hi = u_lo == -1.0 ? 1.0 : std::exp(0.5 * u_lo);
  const double tol = 1e-14 * std::max(1.0, std::fabs(log_s));
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double hm = h(mid);
    if (std::fabs(hm - log_s) <= tol) return {mid, false};
    if (hm >= log_s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Adjacent doubles: return whichever side is closer in log space.
  return {std::fabs(h(lo) - log_s) <= std::fabs(h(hi) - log_s) ? lo : hi, false};
}

}  // namespace oscsing
