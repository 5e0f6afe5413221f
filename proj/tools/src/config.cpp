#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "format.hpp"

namespace oscsing::cli {

namespace {

const KeySpec* find_key(std::string_view key) {
  for (const KeySpec& k : key_table())
    if (k.key == key) return &k;
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw UsageError(std::string(key) + ": invalid value '" + std::string(value) + "' (" + std::string(why) + ")");
}

double parse_real(std::string_view key, std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) bad_value(key, s, "expected a number");
  if (!std::isfinite(v)) bad_value(key, s, "must be finite");
  return v;
}

long parse_integer(std::string_view key, std::string_view s) {
  s = trim(s);
  long v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) bad_value(key, s, "expected an integer");
  return v;
}

std::string canonical_list(std::string_view key, std::string_view value) {
  const std::string_view v = trim(value);
  if (v.empty()) bad_value(key, value, "list is empty");
  std::string out;
  for (std::string_view item : split(v, ',')) {
    if (!out.empty()) out += ',';
    out += format_real(parse_real(key, item));
  }
  return out;
}

std::string canonical(const KeySpec& spec, std::string_view value) {
  const std::string_view key = spec.key;
  const std::string_view v = trim(value);
  switch (spec.kind) {
    case ValueKind::Real:
      return format_real(parse_real(key, v));
    case ValueKind::Integer:
      return std::to_string(parse_integer(key, v));
    case ValueKind::RealList:
      return canonical_list(key, v);
    case ValueKind::AutoRealList:
      return v == "auto" ? std::string("auto") : canonical_list(key, v);
    case ValueKind::AutoInteger:
      return v == "auto" ? std::string("auto") : std::to_string(parse_integer(key, v));
    case ValueKind::Enum: {
      for (std::string_view c : split(spec.choices, '|'))
        if (c == v) return std::string(v);
      bad_value(key, v, "expected one of " + std::string(spec.choices));
    }
    case ValueKind::Text:
      if (v.find('\n') != std::string_view::npos) bad_value(key, v, "must be a single line");
      return std::string(v);
    case ValueKind::Intervals: {
      if (v.empty()) return {};
      std::vector<Interval> parts;
      for (std::string_view item : split(v, ',')) {
        const auto ends = split(item, ':');
        if (ends.size() != 2) bad_value(key, item, "expected lo:hi");
        parts.push_back({parse_real(key, ends[0]), parse_real(key, ends[1])});
      }
      try {
        OpenSet check(parts);
      } catch (const std::invalid_argument& e) {
        bad_value(key, v, e.what());
      }
      std::string out;
      for (const Interval& p : parts) {
        if (!out.empty()) out += ',';
        out += format_real(p.lo) + ':' + format_real(p.hi);
      }
      return out;
    }
  }
  return std::string(v);
}

const KeySpec& spec_of(std::string_view key) {
  const KeySpec* k = find_key(key);
  if (k == nullptr) throw UsageError("unknown configuration key '" + std::string(key) + "'");
  return *k;
}

}  // namespace

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"phase.family", ValueKind::Enum, "power", "power|expflat", "phase family"},
      {"phase.sigma", ValueKind::Real, "3", "", "exponent of the power family, > 1"},
      {"kernel.eps", ValueKind::Real, "0.01", "", "truncation, 0 < eps <= 1"},
      {"kernel.beta", ValueKind::RealList, "0", "", "modulation exponents"},
      {"grid.x_min", ValueKind::Real, "-0.5", "", "left end of the sampling grid"},
      {"grid.x_max", ValueKind::Real, "0.5", "", "right end of the sampling grid"},
      {"grid.n", ValueKind::Integer, "8193", "", "number of grid nodes, >= 2"},
      {"xi.min", ValueKind::Real, "100", "", "smallest frequency of the decay sweep"},
      {"xi.max", ValueKind::Real, "10000", "", "largest frequency of the decay sweep"},
      {"xi.points", ValueKind::Integer, "64", "", "log-spaced frequencies"},
      {"y.values", ValueKind::RealList, "0.01,0.001,0.0001,0.00001", "", "shifts of the smoothness sweep"},
      {"alpha.grid", ValueKind::AutoRealList, "auto", "", "levels, or auto for a log grid below sup|Tf|"},
      {"alpha.points", ValueKind::Integer, "48", "", "levels of the automatic grid"},
      {"alpha.min_frac", ValueKind::Real, "0.01", "", "lowest automatic level as a fraction of sup|Tf|"},
      {"input.kind", ValueKind::Enum, "delta", "delta|bump|samples", "input function"},
      {"input.n", ValueKind::RealList, "100", "", "delta family parameters"},
      {"input.center", ValueKind::Real, "0", "", "bump centre"},
      {"input.radius", ValueKind::Real, "0.25", "", "bump radius"},
      {"input.path", ValueKind::Text, "", "", "samples file: one 're' or 're,im' per line"},
      {"cz.alpha", ValueKind::Real, "1", "", "decomposition height before the (1 + |beta|) scaling"},
      {"cz.k_min", ValueKind::AutoInteger, "auto", "", "coarsest cover scale"},
      {"cz.k_max", ValueKind::AutoInteger, "auto", "", "finest cover scale"},
      {"whitney.omega", ValueKind::Intervals, "0:0.0009765625", "", "open set as lo:hi,lo:hi"},
      {"whitney.k_min", ValueKind::Integer, "0", "", "coarsest cover scale"},
      {"whitney.k_max", ValueKind::Integer, "24", "", "finest cover scale"},
      {"whitney.max_intervals", ValueKind::Integer, "16777216", "", "interval budget"},
      {"whitney.max_rows", ValueKind::Integer, "100000", "", "cover rows written to the CSV"},
      {"operator.method", ValueKind::Enum, "fast", "fast|direct", "operator evaluation"},
      {"audit.t_min", ValueKind::Real, "0.000001", "", "smallest audited point"},
      {"audit.points", ValueKind::Integer, "512", "", "audited points"},
      {"quad.abs_tol", ValueKind::Real, "1e-9", "", "absolute tolerance"},
      {"quad.rel_tol", ValueKind::Real, "1e-8", "", "relative tolerance"},
      {"quad.max_panels", ValueKind::Integer, "1048576", "", "panel budget"},
      {"quad.max_phase_per_panel", ValueKind::Real, "1.5707963267948966", "", "phase bound per panel"},
      {"quad.stationary_seeds", ValueKind::Integer, "1024", "", "samples used to find stationary points"},
      {"check.decay_spread", ValueKind::Real, "10", "", "allowed max/min of the decay ratio"},
      {"check.slope_tol", ValueKind::Real, "0.1", "", "allowed deviation of the fitted decay slope"},
      {"check.smooth_spread", ValueKind::Real, "50", "", "allowed sup/min of the smoothness integral"},
      {"check.cz_spread", ValueKind::Real, "2", "", "allowed variation of kappa and kappa' across inputs"},
      {"check.weak_spread", ValueKind::Real, "10", "", "allowed variation of normalised weak-type constants"},
      {"output.dir", ValueKind::Text, ".", "", "artifact directory"},
      {"output.prefix", ValueKind::Text, "", "", "artifact file stem; empty uses the command name"},
  };
  return table;
}

Config Config::defaults() {
  Config c;
  for (const KeySpec& k : key_table()) c.values_[std::string(k.key)] = canonical(k, k.default_value);
  return c;
}

Config Config::parse(std::string_view text) {
  Config c = defaults();
  std::vector<std::string> seen;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw UsageError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    seen.push_back(key);
    c.set(key, line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw UsageError("override '" + std::string(assignment) + "' is not key=value");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void Config::set(std::string_view key, std::string_view value) {
  const KeySpec& spec = spec_of(key);
  values_[std::string(key)] = canonical(spec, value);
}

std::string Config::normalized() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : normalized()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Config::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

double Config::real(std::string_view key) const { return parse_real(key, text(key)); }

long Config::integer(std::string_view key) const { return parse_integer(key, text(key)); }

std::vector<double> Config::reals(std::string_view key) const {
  std::vector<double> out;
  for (std::string_view item : split(text(key), ',')) out.push_back(parse_real(key, item));
  return out;
}

const std::string& Config::text(std::string_view key) const {
  const auto it = values_.find(std::string(key));
  if (it == values_.end()) throw UsageError("unknown configuration key '" + std::string(key) + "'");
  return it->second;
}

std::vector<Interval> Config::intervals(std::string_view key) const {
  std::vector<Interval> out;
  if (text(key).empty()) return out;
  for (std::string_view item : split(text(key), ',')) {
    const auto ends = split(item, ':');
    out.push_back({parse_real(key, ends[0]), parse_real(key, ends[1])});
  }
  return out;
}

std::optional<long> Config::auto_integer(std::string_view key) const {
  if (text(key) == "auto") return std::nullopt;
  return integer(key);
}

std::optional<std::vector<double>> Config::auto_reals(std::string_view key) const {
  if (text(key) == "auto") return std::nullopt;
  return reals(key);
}

PhasePair Config::phase() const {
  if (text("phase.family") == "expflat") return PhasePair::exp_flat();
  const double sigma = real("phase.sigma");
  if (!(sigma > 1.0)) throw UsageError("phase.sigma must exceed 1");
  return PhasePair::power(sigma);
}

KernelSpec Config::kernel(double beta) const {
  KernelSpec k{phase(), real("kernel.eps"), beta};
  try {
    k.validate();
  } catch (const std::exception& e) {
    throw UsageError(std::string("kernel: ") + e.what());
  }
  return k;
}

QuadConfig Config::quad() const {
  QuadConfig q;
  q.abs_tol = real("quad.abs_tol");
  q.rel_tol = real("quad.rel_tol");
  q.max_panels = static_cast<int>(integer("quad.max_panels"));
  q.max_phase_per_panel = real("quad.max_phase_per_panel");
  q.stationary_seeds = static_cast<int>(integer("quad.stationary_seeds"));
  try {
    q.validate();
  } catch (const std::exception& e) {
    throw UsageError(std::string("quad: ") + e.what());
  }
  return q;
}

double Config::grid_h() const {
  const double lo = real("grid.x_min");
  const double hi = real("grid.x_max");
  const long n = integer("grid.n");
  if (!(lo < hi)) throw UsageError("grid.x_min must be below grid.x_max");
  if (n < 2) throw UsageError("grid.n must be at least 2");
  return (hi - lo) / static_cast<double>(n - 1);
}

}  // namespace oscsing::cli
