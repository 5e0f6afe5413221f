#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "oscsing/decomposition.hpp"
#include "oscsing/kernel.hpp"
#include "oscsing/sampled.hpp"

namespace oscsing {

enum class OperatorMethod { Direct, Fast };
std::string_view to_string(OperatorMethod m);

struct OperatorResult {
  SampledFunction tf;
  OperatorMethod method = OperatorMethod::Direct;
  std::vector<double> point_err;  // direct mode only
  bool converged = true;
};

// Kernel weights against the hat functions of the grid:
// w_m = int K(t) max(0, 1 - |m - t/h|) dt for m = 0 .. ceil(1/h) + 1.
// Both operator modes discretise int K(t) f~(x - t) dt with f~ the piecewise
// linear interpolant of the samples, so they agree up to quadrature error.
std::vector<cdouble> hat_weights(const KernelSpec& k, double h, const QuadConfig& cfg = {});

// T f on the grid x0 + i h, i = 0 .. n + ceil(1/h) + 1.
// Direct: one oscillatory integral per output point (workers threads).
// Fast: hat weights convolved with f by FFT; requires h <= eps / 10
// (GridTooCoarse otherwise).
OperatorResult apply_operator(const KernelSpec& k, const SampledFunction& f, OperatorMethod method,
                              const QuadConfig& cfg = {}, int workers = 1);

// h * #{i : |g_i| > alpha}.
double distribution_function(const SampledFunction& g, double alpha);

struct WeakTypeReport {
  std::vector<double> alphas;
  std::vector<double> lambda;
  std::vector<double> scaled;   // alpha lambda(alpha) / |f|_1
  double constant = 0.0;        // max of scaled
  double normalised = 0.0;      // constant / (1 + |beta|)
  double argmax_alpha = 0.0;
  double f_l1 = 0.0;
  double tf_sup = 0.0;
  bool monotone = true;         // lambda nonincreasing along increasing alpha
  OperatorMethod method = OperatorMethod::Fast;
};

// 48 log-spaced levels on [1e-2 sup|Tf|, sup|Tf|].
std::vector<double> default_alpha_grid(double tf_sup, int points = 48, double min_frac = 1e-2);

// alphas == nullopt selects default_alpha_grid; an explicit grid must be
// nonempty and positive (std::invalid_argument otherwise).
WeakTypeReport weak_type_constant(const KernelSpec& k, const SampledFunction& f,
                                  std::optional<std::vector<double>> alphas, OperatorMethod method,
                                  const QuadConfig& cfg = {}, int workers = 1);
WeakTypeReport weak_type_from(const SampledFunction& tf, double f_l1, double beta,
                              std::optional<std::vector<double>> alphas);

struct BadPartTerm {
  std::size_t part = 0;          // index into CZDecomposition::bad_parts
  int k = 0;
  double b_l1 = 0.0;
  double mollified_outside = 0.0;   // int outside 3 I* of |K * b~|
  double difference_outside = 0.0;  // int outside 3 I* of |K * (b - b~)|
  double mollified_ratio = 0.0;     // over (1 + |beta|) |b|_1
  double difference_ratio = 0.0;
};

struct BadPartReport {
  std::vector<BadPartTerm> terms;
  // int over the complement of the union of 3 I* of |sum_k K * b~_k|, over
  // (1 + |beta|) |f|_1.
  double aggregate = 0.0;
  // Same with the sum taken outside the absolute value (per-part triangle
  // bound).
  double aggregate_triangle = 0.0;
};

// Only parts with |I*| <= 1 contribute. Requires the decomposition grid to
// satisfy h <= eps / 10.
BadPartReport bad_part_estimate(const KernelSpec& k, const CZDecomposition& dec,
                                const QuadConfig& cfg = {});

namespace detail {

// Linear convolution (length a.size() + b.size() - 1) via FFTW.
std::vector<cdouble> fft_convolve(const std::vector<cdouble>& a, const std::vector<cdouble>& b);

// Convolution against a fixed kernel whose spectrum is computed once. apply()
// reuses an internal buffer, so one instance must not be shared across
// threads.
class Convolver {
 public:
  Convolver(const std::vector<cdouble>& kernel, std::size_t max_signal_len);
  ~Convolver();
  Convolver(Convolver&&) noexcept;
  Convolver& operator=(Convolver&&) noexcept;

  // Length signal.size() + kernel.size() - 1; throws std::invalid_argument
  // when the signal exceeds max_signal_len.
  std::vector<cdouble> apply(const std::vector<cdouble>& signal) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace detail

}  // namespace oscsing
