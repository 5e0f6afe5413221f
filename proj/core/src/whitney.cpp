#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "oscsing/decomposition.hpp"
#include "oscsing/errors.hpp"

namespace oscsing {

namespace {

constexpr int kMaxScale = 52;
constexpr double kIndexLimit = 9007199254740992.0;  // 2^53

InverseResult rho_at_scale(const PhasePair& p, int k) {
  return p.gamma_prime_inverse_log(k * std::log(2.0));
}

std::int64_t to_index(double v) {
  if (!(std::fabs(v) < kIndexLimit)) throw DomainError("dyadic index exceeds 2^53");
  return static_cast<std::int64_t>(v);
}

struct Range {
  std::int64_t m1;
  std::int64_t m2;
  std::size_t component;
};

// Removes from [r.m1, r.m2] every index whose dyadic interval at scale k lies
// inside one of the (sorted, merged) covered intervals.
void subtract_covered(const Range& r, int k, const std::vector<Interval>& covered,
                      std::vector<Range>& out) {
  std::int64_t next = r.m1;
  for (const Interval& c : covered) {
    const std::int64_t c1 = to_index(std::ceil(std::ldexp(c.lo, k)));
    const std::int64_t c2 = to_index(std::floor(std::ldexp(c.hi, k))) - 1;
    if (c2 < next) continue;
    if (c1 > r.m2) break;
    if (c1 > next) out.push_back({next, std::min(r.m2, c1 - 1), r.component});
    next = std::max(next, c2 + 1);
    if (next > r.m2) return;
  }
  if (next <= r.m2) out.push_back({next, r.m2, r.component});
}

void merge_into(std::vector<Interval>& covered, const std::vector<Interval>& add) {
  covered.insert(covered.end(), add.begin(), add.end());
  std::sort(covered.begin(), covered.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const Interval& c : covered) {
    if (!merged.empty() && c.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, c.hi);
    } else {
      merged.push_back(c);
    }
  }
  covered.swap(merged);
}

// Component whose closure contains [lo, hi], or npos.
std::size_t component_of(const OpenSet& omega, double lo, double hi) {
  const auto& parts = omega.components();
  auto it = std::upper_bound(parts.begin(), parts.end(), lo,
                             [](double x, const Interval& c) { return x < c.lo; });
  if (it == parts.begin()) return std::string::npos;
  --it;
  if (hi <= it->hi) return static_cast<std::size_t>(it - parts.begin());
  return std::string::npos;
}

PropertyCheck make_check(const char* name, double bound) {
  PropertyCheck c;
  c.name = name;
  c.bound = bound;
  return c;
}

}  // namespace

OpenSet::OpenSet(std::vector<Interval> components) : parts_(std::move(components)) {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (!(parts_[i].lo < parts_[i].hi)) throw std::invalid_argument("open set component is empty");
    if (i > 0 && !(parts_[i - 1].hi < parts_[i].lo)) {
      throw std::invalid_argument("open set components must be sorted and separated");
    }
  }
}

double OpenSet::measure() const {
  double m = 0.0;
  for (const Interval& c : parts_) m += c.length();
  return m;
}

bool OpenSet::contains(double x) const { return distance_to_complement(x) > 0.0; }

double OpenSet::distance_to_complement(double x) const {
  auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                             [](double v, const Interval& c) { return v < c.lo; });
  if (it == parts_.begin()) return 0.0;
  --it;
  if (!(x > it->lo && x < it->hi)) return 0.0;
  return std::min(x - it->lo, it->hi - x);
}

double WhitneyRun::lo(std::int64_t m) const { return std::ldexp(static_cast<double>(m), -k); }
double WhitneyRun::hi(std::int64_t m) const { return std::ldexp(static_cast<double>(m + 1), -k); }
double WhitneyRun::center(std::int64_t m) const {
  return std::ldexp(static_cast<double>(m) + 0.5, -k);
}

std::size_t WhitneyCover::size() const {
  std::size_t n = 0;
  for (const WhitneyRun& r : runs) n += r.count();
  return n;
}

std::pair<std::size_t, std::int64_t> WhitneyCover::locate(std::size_t index) const {
  std::size_t base = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::size_t n = runs[i].count();
    if (index < base + n) return {i, runs[i].m_first + static_cast<std::int64_t>(index - base)};
    base += n;
  }
  throw std::out_of_range("cover index out of range");
}

WhitneyEntry WhitneyCover::entry(std::size_t index) const {
  const auto [ri, m] = locate(index);
  const WhitneyRun& r = runs[ri];
  WhitneyEntry e;
  e.k = r.k;
  e.lo = r.lo(m);
  e.hi = r.hi(m);
  e.center = r.center(m);
  e.star_lo = e.center - r.star_radius;
  e.star_hi = e.center + r.star_radius;
  e.rho = r.rho;
  e.clamped = r.clamped;
  return e;
}

double WhitneyCover::total_length() const {
  double s = 0.0;
  for (const WhitneyRun& r : runs) s += std::ldexp(static_cast<double>(r.count()), -r.k);
  return s;
}

double WhitneyCover::total_star_length() const {
  double s = 0.0;
  for (const WhitneyRun& r : runs) s += static_cast<double>(r.count()) * 2.0 * r.star_radius;
  return s;
}

int default_k_min(const OpenSet& omega, const PhasePair& p, const GrowthWitness& w) {
  double half = 0.0;
  for (const Interval& c : omega.components()) half = std::max(half, 0.5 * c.length());
  for (int k = kMaxScale; k > -kMaxScale; --k) {
    if (w.a * rho_at_scale(p, k).t >= half) return k;
  }
  return -kMaxScale;
}

WhitneyCover whitney_cover(const OpenSet& omega, const PhasePair& p, const GrowthWitness& w,
                           KRange kr, std::size_t max_intervals) {
  w.validate();
  WhitneyCover cover{p, w, kr, {}, 0.0};
  if (omega.empty()) return cover;
  if (kr.k_min > kr.k_max) throw std::invalid_argument("k_min must not exceed k_max");
  if (kr.k_max > kMaxScale || kr.k_min < -kMaxScale) {
    throw DomainError("scales must lie in [-52, 52]");
  }

  const int levels = kr.k_max - kr.k_min + 2;
  std::vector<InverseResult> rho(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i) rho[static_cast<std::size_t>(i)] = rho_at_scale(p, kr.k_min + i);
  auto layer_hi = [&](int k) { return w.a * rho[static_cast<std::size_t>(k - kr.k_min)].t; };
  auto layer_lo = [&](int k) { return w.a * rho[static_cast<std::size_t>(k - kr.k_min + 1)].t; };

  const auto& parts = omega.components();
  double half = 0.0;
  for (const Interval& c : parts) half = std::max(half, 0.5 * c.length());
  if (half > layer_hi(kr.k_min)) {
    std::ostringstream os;
    os << "k_min = " << kr.k_min << " leaves points at distance " << half
       << " from the complement uncovered (coarsest layer reaches " << layer_hi(kr.k_min) << ")";
    throw CoverageGap(os.str());
  }

  std::vector<Interval> covered;
  std::size_t total = 0;
  for (int k = kr.k_min; k <= kr.k_max; ++k) {
    const double lo_k = layer_lo(k);
    const double hi_k = layer_hi(k);
    std::vector<Range> cand;
    for (std::size_t j = 0; j < parts.size(); ++j) {
      const Interval& c = parts[j];
      const double h = 0.5 * c.length();
      if (lo_k > h) continue;
      const double top = std::min(hi_k, h);
      const std::pair<double, double> pieces[] = {{c.lo + lo_k, c.lo + top}, {c.hi - top, c.hi - lo_k}};
      for (const auto& [u, v] : pieces) {
        const std::int64_t m1 = to_index(std::ceil(std::ldexp(u, k))) - 1;
        const std::int64_t m2 = to_index(std::floor(std::ldexp(v, k)));
        if (m1 <= m2) cand.push_back({m1, m2, j});
      }
    }
    std::sort(cand.begin(), cand.end(), [](const Range& a, const Range& b) { return a.m1 < b.m1; });
    std::vector<Range> merged;
    for (const Range& r : cand) {
      if (!merged.empty() && r.m1 <= merged.back().m2 + 1) {
        merged.back().m2 = std::max(merged.back().m2, r.m2);
      } else {
        merged.push_back(r);
      }
    }
    std::vector<Range> kept;
    for (const Range& r : merged) subtract_covered(r, k, covered, kept);

    const InverseResult& rk = rho[static_cast<std::size_t>(k - kr.k_min)];
    std::vector<Interval> hulls;
    for (const Range& r : kept) {
      WhitneyRun run;
      run.k = k;
      run.m_first = r.m1;
      run.m_last = r.m2;
      run.rho = rk.t;
      run.clamped = rk.clamped;
      run.star_radius = 3.0 * rk.t;
      run.component = r.component;
      total += run.count();
      if (total > max_intervals) {
        std::ostringstream os;
        os << "cover exceeds " << max_intervals << " intervals at scale k = " << k;
        throw TooManyIntervals(os.str());
      }
      hulls.push_back({run.lo(r.m1), run.hi(r.m2)});
      cover.runs.push_back(run);
    }
    merge_into(covered, hulls);
  }
  cover.uncovered_measure = std::max(0.0, omega.measure() - cover.total_length());
  return cover;
}

bool CoverReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass; });
}

const PropertyCheck& CoverReport::at(std::string_view name) const {
  for (const PropertyCheck& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no cover check named " + std::string(name));
}

CoverReport verify_cover(const WhitneyCover& cover, const OpenSet& omega) {
  CoverReport rep;
  rep.intervals = cover.size();
  rep.uncovered_measure = cover.uncovered_measure;
  const auto& parts = omega.components();
  const auto& runs = cover.runs;

  std::vector<std::size_t> offset(runs.size() + 1, 0);
  for (std::size_t i = 0; i < runs.size(); ++i) offset[i + 1] = offset[i] + runs[i].count();
  for (const WhitneyRun& r : runs)
    if (r.clamped) rep.clamped += r.count();

  PropertyCheck disjoint = make_check("disjoint", 0.0);
  PropertyCheck coverage = make_check("coverage", 0.0);
  PropertyCheck ratio = make_check("distance_ratio", 20.0);
  PropertyCheck radius = make_check("star_radius", 1e-12);
  PropertyCheck overlap = make_check("overlap", 46.0);
  PropertyCheck measure = make_check("star_measure", 46.0);
  PropertyCheck inside = make_check("star_inside", 0.0);
  PropertyCheck escapes = make_check("star50_escapes", 0.0);

  // Disjoint interiors: runs are contiguous blocks, so compare run hulls.
  {
    std::vector<std::size_t> order(runs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return runs[a].lo(runs[a].m_first) < runs[b].lo(runs[b].m_first);
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
      const WhitneyRun& prev = runs[order[i - 1]];
      const WhitneyRun& cur = runs[order[i]];
      const double overlap_len = prev.hi(prev.m_last) - cur.lo(cur.m_first);
      if (overlap_len > 0.0) {
        disjoint.pass = false;
        disjoint.value = std::max(disjoint.value, overlap_len);
        if (!disjoint.offending) disjoint.offending = offset[order[i]];
      }
    }
  }

  // Union coverage of every point at least one finest-layer width from the
  // complement.
  {
    const double edge = cover.witness.a * rho_at_scale(cover.phase, cover.k_range.k_max + 1).t;
    std::vector<Interval> hulls;
    for (const WhitneyRun& r : runs) hulls.push_back({r.lo(r.m_first), r.hi(r.m_last)});
    std::vector<Interval> un;
    merge_into(un, hulls);
    double missing = 0.0;
    for (const Interval& c : parts) {
      const double u = c.lo + edge;
      const double v = c.hi - edge;
      if (!(u < v)) continue;
      double covered = 0.0;
      for (const Interval& h : un) covered += std::max(0.0, std::min(v, h.hi) - std::max(u, h.lo));
      missing += (v - u) - covered;
    }
    coverage.value = missing;
    coverage.bound = 1e-12 * std::max(omega.measure(), 1e-300);
    coverage.pass = missing <= coverage.bound;
    std::ostringstream os;
    os << "uncovered measure " << cover.uncovered_measure << " lies within " << edge
       << " of the complement";
    coverage.note = os.str();
  }

  double star_total = 0.0;
  ratio.value = runs.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  double ratio_max = 0.0;
  std::optional<std::size_t> ratio_max_at;
  for (std::size_t ri = 0; ri < runs.size(); ++ri) {
    const WhitneyRun& r = runs[ri];
    const double rho = rho_at_scale(cover.phase, r.k).t;
    const double dev = std::fabs(r.star_radius - 3.0 * rho) / rho;
    if (dev > radius.value) radius.value = dev;
    if (dev > radius.bound && !radius.offending) {
      radius.pass = false;
      radius.offending = offset[ri];
    }
    star_total += static_cast<double>(r.count()) * 2.0 * r.star_radius;
    for (std::int64_t m = r.m_first; m <= r.m_last; ++m) {
      const std::size_t gi = offset[ri] + static_cast<std::size_t>(m - r.m_first);
      const double lo = r.lo(m);
      const double hi = r.hi(m);
      const double y = r.center(m);
      const std::size_t comp = component_of(omega, lo, hi);
      double dist = 0.0;
      if (comp != std::string::npos) dist = std::max(0.0, std::min(lo - parts[comp].lo, parts[comp].hi - hi));
      const double q = dist / rho;
      if (q < ratio.value) {
        ratio.value = q;
        if (q < 4.0 - 1e-9) {
          ratio.pass = false;
          if (!ratio.offending) ratio.offending = gi;
        }
      }
      if (q > ratio_max) {
        ratio_max = q;
        ratio_max_at = gi;
      }
      const double s_lo = y - r.star_radius;
      const double s_hi = y + r.star_radius;
      const bool in = comp != std::string::npos && parts[comp].lo < s_lo && s_hi < parts[comp].hi;
      if (!in && inside.pass) {
        inside.pass = false;
        inside.offending = gi;
      }
      const double big = 50.0 * r.star_radius;
      const bool escapes_now =
          comp == std::string::npos || y - big <= parts[comp].lo || y + big >= parts[comp].hi;
      if (!escapes_now && escapes.pass) {
        escapes.pass = false;
        escapes.offending = gi;
      }
    }
  }
  if (ratio_max > 20.0 + 1e-9) {
    ratio.pass = false;
    if (!ratio.offending) ratio.offending = ratio_max_at;
  }
  {
    std::ostringstream os;
    os << "min " << (runs.empty() ? 0.0 : ratio.value) << ", max " << ratio_max;
    ratio.note = os.str();
    ratio.value = ratio_max;
  }

  // Overlap: for each interval, the number of other enlarged intervals it
  // meets, counted per run by index arithmetic.
  {
    struct Hull {
      double lo;
      double hi;
    };
    std::vector<Hull> star_hull(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
      star_hull[i] = {runs[i].center(runs[i].m_first) - runs[i].star_radius,
                      runs[i].center(runs[i].m_last) + runs[i].star_radius};
    }
    double worst = 0.0;
    std::optional<std::size_t> worst_at;
    std::vector<double> deg;
    for (std::size_t ri = 0; ri < runs.size(); ++ri) {
      const WhitneyRun& r = runs[ri];
      deg.assign(r.count(), -1.0);  // the interval itself is counted once below
      for (std::size_t rj = 0; rj < runs.size(); ++rj) {
        if (star_hull[rj].hi < star_hull[ri].lo || star_hull[rj].lo > star_hull[ri].hi) continue;
        const WhitneyRun& o = runs[rj];
        const double reach = r.star_radius + o.star_radius;
        const double scale = std::ldexp(1.0, o.k);
        const double lo_lim = static_cast<double>(o.m_first);
        const double hi_lim = static_cast<double>(o.m_last);
        for (std::size_t i = 0; i < deg.size(); ++i) {
          const double y = r.center(r.m_first + static_cast<std::int64_t>(i));
          const double a = std::max(std::ceil((y - reach) * scale - 0.5), lo_lim);
          const double b = std::min(std::floor((y + reach) * scale - 0.5), hi_lim);
          if (b >= a) deg[i] += b - a + 1.0;
        }
      }
      for (std::size_t i = 0; i < deg.size(); ++i) {
        if (deg[i] > worst) {
          worst = deg[i];
          worst_at = offset[ri] + i;
        }
      }
    }
    overlap.value = worst;
    overlap.pass = worst <= overlap.bound;
    if (!overlap.pass) overlap.offending = worst_at;
  }

  const double om = omega.measure();
  measure.value = om > 0.0 ? star_total / om : 0.0;
  measure.pass = star_total <= 46.0 * om;
  {
    std::ostringstream os;
    os << "sum |I*| = " << star_total << ", |omega| = " << om;
    measure.note = os.str();
  }

  rep.checks = {disjoint, coverage, ratio, radius, overlap, measure, inside, escapes};
  return rep;
}

std::size_t write_cover_csv(std::ostream& os, const WhitneyCover& cover, const OpenSet& omega,
                            std::size_t max_rows) {
  os << "index,k,lo,hi,y,star_lo,star_hi,dist,rho,clamped\n";
  os << std::setprecision(17);
  std::size_t written = 0;
  std::size_t gi = 0;
  for (const WhitneyRun& r : cover.runs) {
    for (std::int64_t m = r.m_first; m <= r.m_last; ++m, ++gi) {
      if (written >= max_rows) return written;
      const double lo = r.lo(m);
      const double hi = r.hi(m);
      const double y = r.center(m);
      const double dist = std::min(omega.distance_to_complement(lo), omega.distance_to_complement(hi));
      os << gi << ',' << r.k << ',' << lo << ',' << hi << ',' << y << ',' << y - r.star_radius << ','
         << y + r.star_radius << ',' << dist << ',' << r.rho << ',' << (r.clamped ? 1 : 0) << '\n';
      ++written;
    }
  }
  return written;
}

}  // namespace oscsing
