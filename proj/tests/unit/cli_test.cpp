#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "config.hpp"
#include "format.hpp"

namespace fs = std::filesystem;
using namespace oscsing::cli;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("oscsing_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" + std::string(OSCSING_CLI_PATH) + "\" " + args + " >" +
                          (scratch_dir() / "stdout.txt").string() + " 2>" + (scratch_dir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out_args(const std::string& stem) {
  return " --set output.dir=" + scratch_dir().string() + " --set output.prefix=" + stem;
}

// Data rows of a CSV as cell vectors, skipping '#' header lines and the
// column row.
std::vector<std::vector<std::string>> body_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  bool columns_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("#", 0) == 0) continue;
    if (!columns_seen) {
      columns_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(CliConfig, NormalizedFormIsAFixedPoint) {
  Config c = Config::parse("phase.sigma = 3.0\nkernel.beta = 0, 4  # two values\nkernel.eps=1e-3\n");
  EXPECT_EQ(c.text("phase.sigma"), "3");
  EXPECT_EQ(c.text("kernel.beta"), "0,4");
  EXPECT_EQ(c.text("kernel.eps"), "0.001");
  const Config again = Config::parse(c.normalized());
  EXPECT_EQ(again.normalized(), c.normalized());
  EXPECT_EQ(again.hash(), c.hash());
  EXPECT_EQ(c.hash_hex().size(), 16u);
}

TEST(CliConfig, HashTracksValues) {
  Config a = Config::defaults();
  Config b = Config::defaults();
  EXPECT_EQ(a.hash(), b.hash());
  b.set("kernel.eps=0.0100");
  EXPECT_EQ(a.hash(), b.hash());
  b.set("kernel.eps", "0.02");
  EXPECT_NE(a.hash(), b.hash());
}

TEST(CliConfig, RejectsMalformedInput) {
  EXPECT_THROW(Config::parse("no.such.key = 1\n"), UsageError);
  EXPECT_THROW(Config::parse("grid.n = 3\ngrid.n = 4\n"), UsageError);
  EXPECT_THROW(Config::parse("grid.n\n"), UsageError);
  EXPECT_THROW(Config::parse("grid.n = 1.5\n"), UsageError);
  EXPECT_THROW(Config::parse("alpha.grid =\n"), UsageError);
  EXPECT_THROW(Config::parse("kernel.beta = 1,,2\n"), UsageError);
  EXPECT_THROW(Config::parse("phase.family = cubic\n"), UsageError);
  EXPECT_THROW(Config::parse("whitney.omega = 0.5:0.1\n"), UsageError);
  EXPECT_THROW(Config::parse("kernel.eps = nan\n"), UsageError);
}

TEST(CliConfig, TypedViewsCheckPreconditions) {
  Config c = Config::defaults();
  c.set("kernel.eps=2");
  EXPECT_THROW(c.kernel(0.0), UsageError);
  c.set("kernel.eps=0.01");
  c.set("phase.sigma=1");
  EXPECT_THROW(c.phase(), UsageError);
  c = Config::defaults();
  c.set("quad.max_panels=0");
  EXPECT_THROW(c.quad(), UsageError);
  c = Config::defaults();
  c.set("grid.x_max=-1");
  EXPECT_THROW(c.grid_h(), UsageError);
  EXPECT_DOUBLE_EQ(Config::defaults().grid_h(), 1.0 / 8192.0);
}

TEST(CliFormat, QuotesPerRfc4180) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(-0.0), "-0");
  EXPECT_EQ(format_real(1.0 / 3.0), "0.3333333333333333");
}

TEST(CliFormat, WritesHeaderSourcesAndBody) {
  CsvTable t;
  t.columns = {"a", "b"};
  t.sources = {{"op", "a,b"}};
  t.add_row({"1", "x,y"});
  EXPECT_THROW(t.add_row({"1"}), std::logic_error);
  std::ostringstream os;
  write_csv(os, {{"schema_version", "1"}}, t);
  EXPECT_EQ(os.str(), "# schema_version=1\r\n# source.op=a,b\r\na,b\r\n1,\"x,y\"\r\n");
}

TEST(CliCommands, NamesRoundTrip) {
  for (const auto& [cmd, name] : command_names()) {
    EXPECT_EQ(parse_command(name), cmd);
    EXPECT_EQ(to_string(cmd), name);
    EXPECT_FALSE(describe(cmd).empty());
  }
  EXPECT_THROW(parse_command("plot"), UsageError);
}

TEST(CliCommands, AuditPowerThree) {
  const RunResult r = run_command(Command::Audit, Config::defaults(), 1);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.table.rows.size(), 8u);
  for (const auto& [name, v] : r.constants) {
    if (name == "derivative_ratio") EXPECT_NEAR(v, 1.0, 1e-9);
  }
}

TEST(CliCommands, SmoothSweep) {
  Config c = Config::defaults();
  c.set("kernel.eps=0.001");
  c.set("kernel.beta=0,4");
  const RunResult r = run_command(Command::Smooth, c, 2);
  EXPECT_TRUE(r.pass) << (r.failures.empty() ? "" : r.failures.front());
  ASSERT_EQ(r.table.rows.size(), 10u);
  EXPECT_EQ(r.table.rows[0][1], "0");
  EXPECT_EQ(r.table.rows[0][2], "0");
  c.set("y.values=1.5");
  EXPECT_THROW(run_command(Command::Smooth, c, 1), UsageError);
}

TEST(CliCommands, WhitneyReportsCoverChecks) {
  Config c = Config::defaults();
  c.set("phase.sigma=2");
  c.set("whitney.omega=0.1:0.35,0.5:0.9");
  c.set("whitney.k_max=12");
  c.set("whitney.max_rows=5");
  const RunResult r = run_command(Command::Whitney, c, 1);
  EXPECT_EQ(r.table.rows.size(), 5u);
  double intervals = 0.0;
  for (const auto& [name, v] : r.constants)
    if (name == "intervals") intervals = v;
  EXPECT_GT(intervals, 5.0);
  for (const auto& f : r.failures) {
    EXPECT_TRUE(f.find("overlap") != std::string::npos || f.find("star_measure") != std::string::npos) << f;
  }
}

TEST(CliCommands, CzStepsOnSmallDelta) {
  Config c = Config::defaults();
  c.set("phase.sigma=2");
  c.set("grid.n=16385");
  c.set("input.n=100");
  const RunResult r = run_command(Command::CzSteps, c, 1);
  EXPECT_TRUE(r.pass) << (r.failures.empty() ? "" : r.failures.front());
  EXPECT_FALSE(r.table.rows.empty());
}

TEST(CliCommands, WeakTypeOnDeltaFamily) {
  Config c = Config::defaults();
  c.set("input.n=10,100");
  c.set("kernel.beta=0,2");
  c.set("alpha.points=12");
  const RunResult r = run_command(Command::WeakType, c, 2);
  EXPECT_EQ(r.table.rows.size(), 4u * 12u);
  for (const auto& f : r.failures) EXPECT_EQ(f.find("increases"), std::string::npos) << f;
  c.set("alpha.grid=1,-2");
  EXPECT_THROW(run_command(Command::WeakType, c, 1), UsageError);
}

TEST(CliCommands, ApplyNeedsOneInputAndOneBeta) {
  Config c = Config::defaults();
  c.set("grid.n=1025");
  c.set("kernel.eps=0.1");
  const RunResult r = run_command(Command::Apply, c, 1);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.table.rows.size(), 1025u + 1024u + 2u);
  c.set("kernel.beta=0,1");
  EXPECT_THROW(run_command(Command::Apply, c, 1), UsageError);
}

TEST(CliBinary, AuditExitsZeroWithUnitRatio) {
  ASSERT_EQ(run_cli("audit --set phase.sigma=3" + out_args("audit3")), 0) << slurp(scratch_dir() / "stderr.txt");
  const std::string csv = slurp(scratch_dir() / "audit3.csv");
  EXPECT_NE(csv.find("# schema_version=1\r\n"), std::string::npos);
  EXPECT_NE(csv.find("# config_hash="), std::string::npos);
  EXPECT_NE(csv.find("# constant.derivative_ratio="), std::string::npos);
  bool found = false;
  for (const auto& row : body_rows(csv)) {
    if (row[0] == "derivative_ratio") {
      found = true;
      EXPECT_EQ(row[1], "true");
      EXPECT_NEAR(std::stod(row[2]), 1.0, 1e-9);
    }
  }
  EXPECT_TRUE(found);
  const std::string json = slurp(scratch_dir() / "audit3.json");
  EXPECT_NE(json.find("\"pass\": true"), std::string::npos);
  EXPECT_NE(json.find("\"timings\""), std::string::npos);
}

TEST(CliBinary, DecaySlopeColumn) {
  const std::string args = "decay --set kernel.eps=0.001 --set xi.min=100 --set xi.max=10000 --set xi.points=16";
  ASSERT_EQ(run_cli(args + out_args("decay3")), 0) << slurp(scratch_dir() / "stdout.txt");
  const auto rows = body_rows(slurp(scratch_dir() / "decay3.csv"));
  ASSERT_EQ(rows.size(), 16u);
  for (const auto& row : rows) {
    ASSERT_EQ(row.size(), 11u);
    EXPECT_NEAR(std::stod(row[10]), -1.0 / 3.0, 0.1);
    EXPECT_EQ(row[7], "true");
  }
}

TEST(CliBinary, IdenticalConfigGivesIdenticalCsv) {
  const std::string args = "decay --set kernel.beta=0,4 --set xi.points=12" + out_args("det");
  ASSERT_NE(run_cli(args, "OSCSING_WORKERS=1"), 2);
  const std::string first = slurp(scratch_dir() / "det.csv");
  ASSERT_NE(run_cli(args, "OSCSING_WORKERS=3"), 2);
  const std::string second = slurp(scratch_dir() / "det.csv");
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, second);
}

TEST(CliBinary, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("weaktype --set alpha.grid=" + out_args("w")), 2);
  EXPECT_EQ(run_cli("audit --set no.such.key=1"), 2);
  EXPECT_EQ(run_cli("audit --config " + (scratch_dir() / "missing.conf").string()), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("apply --set input.kind=samples --set input.path=" + (scratch_dir() / "none.txt").string()), 2);
  EXPECT_EQ(run_cli("audit", "OSCSING_WORKERS=zero"), 2);
  EXPECT_EQ(run_cli("--help"), 0);
}

TEST(CliBinary, ConfigFileAndPrintConfig) {
  const fs::path conf = scratch_dir() / "run.conf";
  std::ofstream(conf) << "# comment line\nphase.family = expflat\naudit.points = 64\n";
  ASSERT_EQ(run_cli("audit --print-config --config " + conf.string()), 0);
  const std::string printed = slurp(scratch_dir() / "stdout.txt");
  EXPECT_EQ(printed, Config::load(conf).normalized());
  EXPECT_NE(printed.find("phase.family = expflat\n"), std::string::npos);
}

TEST(CliBinary, SamplesFileInput) {
  const fs::path samples = scratch_dir() / "samples.txt";
  {
    std::ofstream out(samples);
    for (int i = 0; i < 257; ++i) out << (i == 128 ? "256" : "0") << (i % 2 ? ",0\n" : "\n");
  }
  const std::string base = "apply --set input.kind=samples --set grid.n=257 --set kernel.eps=0.1 --set input.path=";
  EXPECT_EQ(run_cli(base + samples.string() + out_args("samples")), 0) << slurp(scratch_dir() / "stderr.txt");
  EXPECT_EQ(body_rows(slurp(scratch_dir() / "samples.csv")).size(), 257u + 256u + 2u);
  EXPECT_EQ(run_cli(base + samples.string() + " --set grid.n=300" + out_args("samples_bad")), 2);
}
