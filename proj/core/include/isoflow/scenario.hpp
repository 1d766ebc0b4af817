#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isoflow/continuum.hpp"
#include "isoflow/diagnostics.hpp"
#include "isoflow/flows.hpp"
#include "isoflow/integrators.hpp"
#include "isoflow/matrix.hpp"

namespace isoflow {

/// SplitMix64: state += 0x9E3779B97F4A7C15, then
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
/// z ^= z >> 31.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// (next() >> 11) * 2^-53, in [0, 1).
  double uniform();
  /// 2 uniform() - 1, in [-1, 1).
  double symmetric();

 private:
  std::uint64_t state_;
};

/// Tridiagonal symmetric matrix with diagonal entries L_00..L_{n-1,n-1}
/// drawn first, then off-diagonal entries L_01..L_{n-2,n-1}, each
/// SplitMix64(seed).symmetric().
SymmetricMatrix random_tridiagonal(Index n, std::uint64_t seed);

enum class ScenarioType { kFlow, kContinuum };

struct RasterSettings {
  bool enabled = false;
  Index nlat = 181;
  Index nlon = 360;
  int width = 720;
  int height = 360;
  /// Steps to render; empty means first and last snapshot.
  std::vector<std::size_t> steps;
};

/// One scenario: either a set of matrix flows sharing an initial state, or
/// a continuum (a, b) run.
struct ScenarioConfig {
  std::string name = "custom";
  ScenarioType type = ScenarioType::kFlow;
  Index n = 256;
  std::uint64_t seed = 1;
  /// Matrix file for the initial state; empty means random_tridiagonal(n, seed).
  std::string input;
  std::vector<FlowKind> flows{FlowKind::kIpm};
  IntegratorConfig integrator;
  /// Per-flow step sizes overriding integrator.h.
  std::map<FlowKind, double> step_size;
  RasterSettings raster;
  ContinuumConfig continuum;
  std::filesystem::path output = "isoflow-out";

  double h_for(FlowKind kind) const;
  void validate() const;
};

/// Traced diagonal indices used when none are configured: 9, 49, 99, 149,
/// 199 restricted to [0, n).
std::vector<Index> default_traced(Index n);

/// Applies one `key=value` setting. Throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Parses a key=value file ('#' comments, blank lines ignored).
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Serializes every setting so that parse_config(to_config_text(cfg))
/// reproduces cfg.
std::string to_config_text(const ScenarioConfig& cfg);

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
ScenarioConfig preset(std::string_view name);

struct FlowRunResult {
  FlowKind kind = FlowKind::kIpm;
  std::filesystem::path directory;
  Trajectory trajectory;
  double seconds = 0.0;
};

struct ScenarioResult {
  std::filesystem::path directory;
  SymmetricMatrix initial;
  std::vector<FlowRunResult> flows;
  ContinuumRun continuum;
};

using LogFn = std::function<void(const std::string&)>;

/// Runs every configured flow (or the continuum run) and writes, per run,
/// trajectory.csv, spectrum.csv, manifest.txt and optional raster PNGs into
/// <output>/<name>/<flow>/.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const LogFn& log = {});

/// CSV writers; numbers use %.17g.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::span<const Index> traced);
void write_spectrum_csv(std::ostream& out, const Trajectory& traj);
void write_continuum_csv(std::ostream& out, const ContinuumRun& run);

}  // namespace isoflow
