#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "isoflow/errors.hpp"
#include "isoflow/matrix.hpp"
#include "isoflow/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

isoflow::ScenarioConfig resolve_target(const std::string& target) {
  if (std::filesystem::exists(target)) {
    return isoflow::load_config(target);
  }
  for (const auto& name : isoflow::preset_names()) {
    if (name == target) {
      return isoflow::preset(name);
    }
  }
  throw isoflow::ConfigError(
      fmt::format("'{}' is neither a config file nor a preset (see list-scenarios)", target));
}

void apply_overrides(isoflow::ScenarioConfig& cfg, const std::vector<std::string>& args) {
  for (const auto& arg : args) {
    if (arg.rfind("--", 0) != 0 || arg.find('=') == std::string::npos) {
      throw isoflow::ConfigError(fmt::format("override '{}' must have the form --key=value", arg));
    }
    const auto eq = arg.find('=');
    isoflow::apply_setting(cfg, std::string_view(arg).substr(2, eq - 2),
                           std::string_view(arg).substr(eq + 1));
  }
}

int cmd_run(const std::string& target, const std::vector<std::string>& overrides, bool quiet) {
  isoflow::ScenarioConfig cfg = resolve_target(target);
  apply_overrides(cfg, overrides);
  if (const char* root = std::getenv("ISOFLOW_OUT"); root != nullptr && *root != '\0') {
    cfg.output = root;
  }
  cfg.validate();
  isoflow::LogFn log;
  if (!quiet) {
    log = [](const std::string& line) { std::cerr << line << '\n'; };
  }
  const auto result = isoflow::run_scenario(cfg, log);
  std::cout << result.directory.string() << '\n';
  return 0;
}

int cmd_list() {
  for (const auto& name : isoflow::preset_names()) {
    const auto cfg = isoflow::preset(name);
    if (cfg.type == isoflow::ScenarioType::kContinuum) {
      fmt::print("{}\tcontinuum (a, b) run, {} nodes, t_end {}\n", name, cfg.continuum.nodes,
                 cfg.continuum.t_end);
      continue;
    }
    std::string flows;
    for (const auto kind : cfg.flows) {
      if (!flows.empty()) flows += ',';
      flows += isoflow::to_string(kind);
    }
    fmt::print("{}\tflows {}, n {}, seed {}, {} steps\n", name, flows, cfg.n, cfg.seed,
               cfg.integrator.steps);
  }
  return 0;
}

int cmd_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw isoflow::ConfigError(fmt::format("cannot open {}", path));
  }
  const isoflow::SymmetricMatrix l(isoflow::read_matrix(in));
  const auto report = isoflow::jacobi_spectrum(l);
  for (const double ev : report.eigenvalues) {
    fmt::print("{:.17g}\n", ev);
  }
  fmt::print(stderr, "residual {:.3e} after {} sweeps\n", report.residual, report.sweeps);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isospectral matrix flows and their continuum limit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ISOFLOW_VERSION);

  std::string target;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run a scenario config file or preset; extra --key=value "
                                        "arguments override config keys");
  run->add_option("config", target, "Config file or preset name")->required();
  run->add_flag("-q,--quiet", quiet, "Suppress progress output");
  run->allow_extras();

  app.add_subcommand("list-scenarios", "List built-in presets");

  std::string matrix_path;
  auto* spectrum = app.add_subcommand("spectrum", "Print the Jacobi spectrum of a matrix file");
  spectrum->add_option("matrix-file", matrix_path, "Matrix text file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) {
      return cmd_run(target, run->remaining(), quiet);
    }
    if (spectrum->parsed()) {
      return cmd_spectrum(matrix_path);
    }
    return cmd_list();
  } catch (const isoflow::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const isoflow::FormatError& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kExitConfig;
  } catch (const isoflow::StepError& e) {
    fmt::print(stderr, "numerical failure at step {}: {}\n", e.step(), e.what());
    return kExitNumerical;
  } catch (const isoflow::NumericalError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
