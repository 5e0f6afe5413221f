#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oscsing/decomposition.hpp"
#include "oscsing/kernel.hpp"
#include "oscsing/quadrature.hpp"

namespace oscsing::cli {

// Malformed invocation or configuration; maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValueKind { Real, Integer, RealList, Enum, Text, Intervals, AutoInteger, AutoRealList };

struct KeySpec {
  std::string_view key;
  ValueKind kind;
  std::string_view default_value;
  std::string_view choices;  // '|'-separated, Enum only
  std::string_view help;
};

const std::vector<KeySpec>& key_table();

// Flat dotted key = value configuration. Every stored value is in canonical
// form, so normalized() is a fixed point of parse().
class Config {
 public:
  static Config defaults();
  // Lines "key = value"; '#' starts a comment. Unknown keys, duplicates and
  // malformed values throw UsageError.
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  // "key=value".
  void set(std::string_view assignment);
  void set(std::string_view key, std::string_view value);

  std::string normalized() const;
  std::uint64_t hash() const;
  std::string hash_hex() const;
  const std::map<std::string, std::string>& values() const { return values_; }

  double real(std::string_view key) const;
  long integer(std::string_view key) const;
  std::vector<double> reals(std::string_view key) const;
  const std::string& text(std::string_view key) const;
  std::vector<Interval> intervals(std::string_view key) const;
  std::optional<long> auto_integer(std::string_view key) const;
  std::optional<std::vector<double>> auto_reals(std::string_view key) const;

  // Typed views with module preconditions checked (UsageError otherwise).
  PhasePair phase() const;
  KernelSpec kernel(double beta) const;
  QuadConfig quad() const;
  double grid_h() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace oscsing::cli
