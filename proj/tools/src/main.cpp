#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "oscsing/version.hpp"

namespace {

struct Invocation {
  oscsing::cli::Command command;
  CLI::App* app = nullptr;
  std::string config_path;
  std::vector<std::string> overrides;
  bool print_config = false;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace oscsing::cli;
  CLI::App app{"Experiments on oscillatory singular integral kernels", "oscsing-run"};
  app.set_version_flag("--version", std::string(oscsing::kVersion));
  app.require_subcommand(1);

  std::vector<Invocation> invocations;
  invocations.reserve(command_names().size());
  for (const auto& [cmd, name] : command_names()) {
    Invocation& inv = invocations.emplace_back();
    inv.command = cmd;
    inv.app = app.add_subcommand(std::string(name), std::string(describe(cmd)));
    inv.app->add_option("--config", inv.config_path, "key = value configuration file");
    inv.app->add_option("--set", inv.overrides, "override one key, KEY=VALUE (repeatable)")->take_all();
    inv.app->add_flag("--print-config", inv.print_config, "print the normalised configuration and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  for (const Invocation& inv : invocations) {
    if (!inv.app->parsed()) continue;
    int workers = 1;
    Config cfg;
    try {
      cfg = inv.config_path.empty() ? Config::defaults() : Config::load(inv.config_path);
      for (const auto& s : inv.overrides) cfg.set(s);
      workers = workers_from_env();
    } catch (const UsageError& e) {
      std::cerr << to_string(inv.command) << ": " << e.what() << '\n';
      return 2;
    }
    if (inv.print_config) {
      std::cout << cfg.normalized();
      return 0;
    }
    return execute(inv.command, cfg, workers, std::cout, std::cerr);
  }
  return 2;
}
