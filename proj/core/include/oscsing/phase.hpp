#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oscsing {

enum class PhaseFamily { Power, ExpFlat, Custom };

// Which of the six maps of a phase pair to evaluate.
enum class Derivative { Gamma, Gamma1, Gamma2, Gamma3, Psi, Psi1 };

std::string_view to_string(Derivative d);
std::string_view to_string(PhaseFamily f);

// A real number stored as sign * exp(log_abs). Lets the audit compare
// quantities such as exp(1/t) / t^2 at t = 1e-6 without overflow.
struct SignedLog {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();

  static SignedLog of(double v);
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
  bool finite() const { return sign == 0 || std::isfinite(log_abs); }
};

bool operator<(const SignedLog& a, const SignedLog& b);
bool operator==(const SignedLog& a, const SignedLog& b);

// Caller-supplied maps for a Custom pair; all six are required.
struct CustomMaps {
  std::function<double(double)> gamma;
  std::function<double(double)> gamma1;
  std::function<double(double)> gamma2;
  std::function<double(double)> gamma3;
  std::function<double(double)> psi;
  std::function<double(double)> psi1;
};

// Result of the clamped inverse of gamma'.
struct InverseResult {
  double t = 1.0;
  bool clamped = false;
};

// An admissible phase/amplitude pair (gamma, psi) on (0, 1].
//
// Built-in families:
//   Power(sigma): gamma(t) = -t^(1 - sigma),  psi(t) = t^((sigma + 1) / 2)
//   ExpFlat:      gamma(t) = -exp(1 / t),     psi(t) = t^(3/2) exp(-1 / (2t))
//
// ExpFlat uses the negated exponential so that gamma' is positive and
// decreasing; the kernel it produces is the conjugate of the one built from
// +exp(1/t) and has the same modulus estimates.
//
// Values are immutable after construction and safe to share across threads.
class PhasePair {
 public:
  static PhasePair power(double sigma);
  static PhasePair exp_flat();
  // t0 is the threshold below which the derivative_ratio, growth and
  // curvature_power checks are audited; s0 (the lower frequency bound for
  // curvature_doubling) defaults to gamma'(1).
  static PhasePair custom(CustomMaps maps, double t0 = 1.0,
                          std::optional<double> s0 = std::nullopt,
                          std::string name = "custom");

  PhaseFamily family() const { return family_; }
  double sigma() const { return sigma_; }
  double t0() const { return t0_; }
  double s0() const { return s0_; }
  std::string name() const;

  // Domain-checked evaluation; throws DomainError unless 0 < t <= 1.
  double eval(Derivative which, double t) const;

  // Unchecked evaluation used on hot paths. Built-in families accept any
  // t > 0 (closed forms extend past 1).
  double value(Derivative which, double t) const;
  double gamma(double t) const { return value(Derivative::Gamma, t); }
  double gamma1(double t) const { return value(Derivative::Gamma1, t); }
  double gamma2(double t) const { return value(Derivative::Gamma2, t); }
  double psi(double t) const { return value(Derivative::Psi, t); }

  // sign and log|.| of a map, exact closed forms for built-in families.
  SignedLog log_value(Derivative which, double t) const;
  // ln psi(t) without underflow for ExpFlat.
  double log_psi(double t) const;

  // rho(s) = (gamma')^{-1}(max(s, gamma'(1))), root-found to relative 1e-12
  // in s (closed form for Power).
  InverseResult gamma_prime_inverse(double s) const;
  // Same, parametrised by L = ln s so huge frequencies do not overflow.
  InverseResult gamma_prime_inverse_log(double log_s) const;
  double rho(double s) const { return gamma_prime_inverse(s).t; }

 private:
  PhasePair() = default;

  PhaseFamily family_ = PhaseFamily::Power;
  double sigma_ = 3.0;
  double t0_ = 1.0;
  double s0_ = 0.0;
  std::string name_;
  std::shared_ptr<const CustomMaps> maps_;
};

}  // namespace oscsing
