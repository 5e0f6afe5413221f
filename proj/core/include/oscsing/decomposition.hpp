#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "oscsing/audit.hpp"
#include "oscsing/phase.hpp"
#include "oscsing/sampled.hpp"

namespace oscsing {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

// Finite union of disjoint open intervals, sorted with a_j < b_j < a_{j+1}.
class OpenSet {
 public:
  OpenSet() = default;
  // Throws std::invalid_argument if the components are unsorted, empty or
  // touching.
  explicit OpenSet(std::vector<Interval> components);

  const std::vector<Interval>& components() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  double measure() const;
  bool contains(double x) const;
  // Distance from x to the complement (0 outside the set).
  double distance_to_complement(double x) const;

 private:
  std::vector<Interval> parts_;
};

struct KRange {
  int k_min = 0;
  int k_max = 0;
};

// A maximal block of consecutive dyadic intervals [m 2^-k, (m+1) 2^-k],
// m_first <= m <= m_last, selected at one scale inside one component.
struct WhitneyRun {
  int k = 0;
  std::int64_t m_first = 0;
  std::int64_t m_last = -1;
  double rho = 1.0;           // rho(2^k), clamped at gamma'(1)
  bool clamped = false;
  double star_radius = 0.0;   // 3 rho unless altered
  std::size_t component = 0;

  std::size_t count() const { return static_cast<std::size_t>(m_last - m_first + 1); }
  double lo(std::int64_t m) const;
  double hi(std::int64_t m) const;
  double center(std::int64_t m) const;
};

// One materialised interval of a cover.
struct WhitneyEntry {
  int k = 0;
  double lo = 0.0;
  double hi = 0.0;
  double center = 0.0;
  double star_lo = 0.0;
  double star_hi = 0.0;
  double rho = 1.0;
  bool clamped = false;
};

// Interval cover adapted to gamma': intervals of length 2^-k whose distance to
// the complement is comparable to rho(2^k), with enlarged intervals
// I* = [y - 3 rho, y + 3 rho] around their centres y. Stored run-length
// encoded, ordered by increasing k and then left to right.
struct WhitneyCover {
  PhasePair phase;
  GrowthWitness witness;
  KRange k_range;
  std::vector<WhitneyRun> runs;
  // Measure of the part of the set lying closer to the complement than the
  // finest layer reaches.
  double uncovered_measure = 0.0;

  std::size_t size() const;
  WhitneyEntry entry(std::size_t index) const;
  // (run, m) of a global index; throws std::out_of_range.
  std::pair<std::size_t, std::int64_t> locate(std::size_t index) const;
  double total_length() const;
  double total_star_length() const;
};

// Largest k whose coarsest layer a rho(2^k) reaches the centre of every
// component.
int default_k_min(const OpenSet& omega, const PhasePair& p, const GrowthWitness& w);

// Throws InvalidWitness, CoverageGap (a component wider than the k_min layer
// allows), TooManyIntervals, or DomainError for scales beyond 2^-52.
WhitneyCover whitney_cover(const OpenSet& omega, const PhasePair& p, const GrowthWitness& w,
                           KRange k_range, std::size_t max_intervals = std::size_t{1} << 28);

struct PropertyCheck {
  std::string name;
  bool pass = true;
  double value = 0.0;   // observed extreme
  double bound = 0.0;   // allowed extreme
  std::optional<std::size_t> offending;
  std::string note;
};

struct CoverReport {
  std::vector<PropertyCheck> checks;
  std::size_t intervals = 0;
  std::size_t clamped = 0;
  double uncovered_measure = 0.0;

  bool pass() const;
  const PropertyCheck& at(std::string_view name) const;
};

// Checks: disjoint, coverage, distance_ratio, star_radius, overlap,
// star_measure, star_inside, star50_escapes.
CoverReport verify_cover(const WhitneyCover& cover, const OpenSet& omega);

// CSV with one row per interval (k, lo, hi, y, star_lo, star_hi, dist, rho).
// At most max_rows rows are written; returns the number written.
std::size_t write_cover_csv(std::ostream& os, const WhitneyCover& cover, const OpenSet& omega,
                            std::size_t max_rows = SIZE_MAX);

enum class MaximalMode { Exact, Dyadic };
std::string_view to_string(MaximalMode m);

struct MaximalResult {
  SampledFunction mf;  // real values
  MaximalMode mode = MaximalMode::Exact;
};

// Uncentred discrete maximal function of |f|. Exact O(n^2) when
// f.size() <= exact_threshold, otherwise the maximum over centred windows of
// 2^j + 1 ... samples, which is within a factor 4 of the exact value.
MaximalResult maximal_function(const SampledFunction& f,
                               std::size_t exact_threshold = std::size_t{1} << 14);

// Grid runs where values exceed the threshold, as intervals
// (x_left - h/2, x_right + h/2).
OpenSet superlevel_set(const SampledFunction& values, double threshold);

// Convolution with phi(x / scale) / scale, phi = c exp(-1 / (1 - x^2)), taps
// renormalised to unit grid mass. Throws GridTooCoarse if h > scale / 8.
SampledFunction mollify(const SampledFunction& b, double scale);

struct BadPart {
  std::size_t cover_index = 0;
  int k = 0;
  Interval interval;
  Interval star;
  SampledFunction b;
  double mean_removed = 0.0;
  double l1 = 0.0;
  std::optional<SampledFunction> mollified;
};

struct CZOptions {
  std::optional<int> k_min;
  std::optional<int> k_max;  // default floor(log2(1 / (8 h)))
  std::size_t exact_threshold = std::size_t{1} << 14;
  std::size_t max_parts = std::size_t{1} << 16;
};

struct CZDecomposition {
  double alpha = 0.0;
  double alpha_prime = 0.0;
  double beta = 0.0;
  OpenSet omega;
  std::optional<WhitneyCover> cover;
  MaximalMode maximal_mode = MaximalMode::Exact;
  SampledFunction g;
  std::vector<BadPart> bad_parts;

  double f_l1 = 0.0;
  double kappa = 0.0;        // |g|_inf / alpha'
  double kappa_prime = 0.0;  // sum |b_k|_1 / |f|_1
  double reconstruction_error = 0.0;  // max |g + sum b - f| / max |f|
  double max_mean_ratio = 0.0;        // max |h sum b_k| / |b_k|_1
};

// Parts are subtracted from the running residual in cover order, so g plus
// the parts reproduces f exactly up to rounding and every part has mean
// zero on the grid.
CZDecomposition cz_decompose(const SampledFunction& f, double alpha, double beta,
                             const PhasePair& p, const GrowthWitness& w, const CZOptions& opt = {});

}  // namespace oscsing
