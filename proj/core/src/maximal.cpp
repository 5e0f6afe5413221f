#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oscsing/decomposition.hpp"

namespace oscsing {

std::string_view to_string(MaximalMode m) { return m == MaximalMode::Exact ? "exact" : "dyadic"; }

MaximalResult maximal_function(const SampledFunction& f, std::size_t exact_threshold) {
  f.validate();
  const std::size_t n = f.size();
  MaximalResult res;
  res.mf = SampledFunction::zeros(f.x0, f.h, n);
  if (n == 0) return res;

  // Prefix sums of |f| in units of samples; the grid spacing cancels in the
  // averages.
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + std::abs(f.samples[i]);
  // Single-sample windows seed the maximum exactly; prefix differences can
  // round below |f_i|.
  std::vector<double> mf(n);
  for (std::size_t i = 0; i < n; ++i) mf[i] = std::abs(f.samples[i]);

  if (n <= exact_threshold) {
    res.mode = MaximalMode::Exact;
    // For a fixed left end p, walking q downwards keeps the best average over
    // [p, q'] with q' >= q, which is the best window starting at p that
    // contains q.
    for (std::size_t p = 0; p < n; ++p) {
      const double base = prefix[p];
      double best = 0.0;
      for (std::size_t q = n; q-- > p;) {
        const double avg = (prefix[q + 1] - base) / static_cast<double>(q - p + 1);
        if (avg > best) best = avg;
        if (best > mf[q]) mf[q] = best;
      }
    }
  } else {
    res.mode = MaximalMode::Dyadic;
    for (std::size_t r = 0;; r = (r == 0 ? 1 : 2 * r)) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= r ? i - r : 0;
        const std::size_t hi = std::min(n - 1, i + r);
        const double avg = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(2 * r + 1);
        if (avg > mf[i]) mf[i] = avg;
      }
      if (r >= n) break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) res.mf.samples[i] = mf[i];
  return res;
}

OpenSet superlevel_set(const SampledFunction& values, double threshold) {
  std::vector<Interval> parts;
  const std::size_t n = values.size();
  std::size_t i = 0;
  while (i < n) {
    if (!(values.samples[i].real() > threshold)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && values.samples[j + 1].real() > threshold) ++j;
    parts.push_back({values.x(i) - 0.5 * values.h, values.x(j) + 0.5 * values.h});
    i = j + 1;
  }
  return OpenSet(std::move(parts));
}

}  // namespace oscsing
