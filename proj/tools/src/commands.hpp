#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "config.hpp"
#include "format.hpp"

namespace oscsing::cli {

enum class Command { Audit, Decay, Smooth, Whitney, CzSteps, WeakType, Apply };

const std::vector<std::pair<Command, std::string_view>>& command_names();
std::string_view to_string(Command c);
// Throws UsageError for an unknown name.
Command parse_command(std::string_view name);
std::string_view describe(Command c);

inline constexpr int kSchemaVersion = 1;

struct RunResult {
  bool pass = true;
  std::vector<std::string> failures;
  std::vector<std::pair<std::string, double>> constants;
  CsvTable table;
  double compute_seconds = 0.0;

  void fail(std::string why);
  void constant(std::string name, double value);
};

// Runs one experiment. Throws UsageError when the configuration violates a
// module precondition.
RunResult run_command(Command c, const Config& cfg, int workers);

struct Artifacts {
  std::filesystem::path csv;
  std::filesystem::path json;
};

Artifacts artifact_paths(Command c, const Config& cfg);
HeaderBlock csv_header(Command c, const Config& cfg, const RunResult& r);
std::string json_summary(Command c, const Config& cfg, const RunResult& r, const Artifacts& a,
                         double total_seconds);

// Runs, writes the artifacts and a short report. Returns the exit status:
// 0 all checks pass, 1 a check failed or the run could not finish, 2 usage
// error.
int execute(Command c, const Config& cfg, int workers, std::ostream& out, std::ostream& err);

// Worker count from OSCSING_WORKERS (default 1). Throws UsageError when set
// to anything but a positive integer.
int workers_from_env();

}  // namespace oscsing::cli
