#include "isoflow/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "isoflow/errors.hpp"
#include "isoflow/quantization.hpp"
#include "isoflow/raster.hpp"

#ifndef ISOFLOW_VERSION
#define ISOFLOW_VERSION "unknown"
#endif

namespace isoflow {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(fmt::format("cannot open {} for writing", path.string()));
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, const ScenarioConfig& cfg,
                    const std::vector<std::string>& extra) {
  std::ofstream out = open_out(path);
  out << "# isoflow " << ISOFLOW_VERSION << '\n';
  out << fmt::format("# eigen {}.{}.{}\n", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                     EIGEN_MINOR_VERSION);
#if defined(__VERSION__)
  out << "# compiler " << __VERSION__ << '\n';
#endif
  if (cfg.type == ScenarioType::kFlow && cfg.input.empty()) {
    out << "# initial state: random_tridiagonal(n, seed), entries uniform on [-1, 1) from "
           "splitmix64, diagonal first\n";
  }
  for (const auto& line : extra) {
    out << "# " << line << '\n';
  }
  out << to_config_text(cfg);
}

SymmetricMatrix initial_state(const ScenarioConfig& cfg) {
  if (cfg.input.empty()) {
    return random_tridiagonal(cfg.n, cfg.seed);
  }
  std::ifstream in(cfg.input);
  if (!in) {
    throw ConfigError(fmt::format("input: cannot open {}", cfg.input));
  }
  SymmetricMatrix l(read_matrix(in));
  if (l.n() != cfg.n) {
    throw ConfigError(fmt::format("input: matrix is {}x{} but n = {}", l.n(), l.n(), cfg.n));
  }
  return l;
}

ScenarioResult run_continuum(const ScenarioConfig& cfg, const LogFn& log) {
  ScenarioResult result;
  result.directory = cfg.output / cfg.name;
  const auto dir = result.directory / "continuum";
  std::filesystem::create_directories(dir);
  const auto start = std::chrono::steady_clock::now();
  const AbState init = gaussian_bump(cfg.continuum);
  result.continuum = evolve_ab(init, cfg.continuum.h, cfg.continuum.t_end, cfg.continuum.record_every);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  {
    std::ofstream out = open_out(dir / "continuum.csv");
    write_continuum_csv(out, result.continuum);
  }
  {
    std::ofstream out = open_out(dir / "field.csv");
    out << "z,a,b\n";
    const AbState& s = result.continuum.final_state;
    for (Index j = 0; j < s.grid.size; ++j) {
      out << fmt::format("{:.17g},{:.17g},{:.17g}\n", s.grid.z(j), s.a(j), s.b(j));
    }
  }
  write_manifest(dir / "manifest.txt", cfg,
                 {fmt::format("seconds={:.3f}", seconds),
                  fmt::format("j2_relative_drift={:.17g}", result.continuum.j2_drift)});
  if (log) {
    log(fmt::format("continuum: J2 relative drift {:.3e} ({:.2f} s)", result.continuum.j2_drift,
                    seconds));
  }
  return result;
}

}  // namespace

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::symmetric() { return 2.0 * uniform() - 1.0; }

SymmetricMatrix random_tridiagonal(Index n, std::uint64_t seed) {
  if (n < 2) {
    throw DomainError(fmt::format("random_tridiagonal: n must be >= 2, got {}", n));
  }
  SplitMix64 rng(seed);
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    m(i, i) = rng.symmetric();
  }
  for (Index i = 0; i + 1 < n; ++i) {
    const double v = rng.symmetric();
    m(i, i + 1) = v;
    m(i + 1, i) = v;
  }
  return SymmetricMatrix(std::move(m));
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::span<const Index> traced) {
  out << "step,time,offdiag_norm,inversions,lyapunov,spectral_drift,I2,I3,I4";
  for (const Index i : traced) {
    out << ",diag_" << i;
  }
  out << '\n';
  for (const auto& r : traj.records) {
    out << fmt::format("{},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}", r.step,
                       r.time, r.offdiag_norm, r.inversions, r.lyapunov, r.spectral_drift,
                       r.traces[0], r.traces[1], r.traces[2]);
    for (const double d : r.traced_diagonals) {
      out << fmt::format(",{:.17g}", d);
    }
    out << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const Trajectory& traj) {
  const Vector diag = traj.final_state.diagonal();
  std::vector<double> sorted(diag.data(), diag.data() + diag.size());
  std::sort(sorted.begin(), sorted.end());
  out << "index,final_diagonal,final_diagonal_sorted,oracle\n";
  for (Index i = 0; i < diag.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    out << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", i, diag(i), sorted[k],
                       traj.reference.eigenvalues[k]);
  }
}

void write_continuum_csv(std::ostream& out, const ContinuumRun& run) {
  out << "step,time,J1,J2,sup_a,sup_b\n";
  for (const auto& r : run.records) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.step, r.time, r.j1, r.j2,
                       r.sup_a, r.sup_b);
  }
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const LogFn& log) {
  cfg.validate();
  if (cfg.type == ScenarioType::kContinuum) {
    return run_continuum(cfg, log);
  }

  ScenarioResult result;
  result.directory = cfg.output / cfg.name;
  result.initial = initial_state(cfg);
  const std::vector<Index> traced =
      cfg.integrator.traced.empty() ? default_traced(cfg.n) : cfg.integrator.traced;

  std::shared_ptr<const DiscreteLaplacian> lap;
  const bool needs_lap = cfg.raster.enabled ||
                         std::any_of(cfg.flows.begin(), cfg.flows.end(), [](FlowKind k) {
                           return k == FlowKind::kIpm || k == FlowKind::kDiagFlow;
                         });
  if (needs_lap) {
    lap = std::make_shared<const DiscreteLaplacian>(band_coefficients(build_generators(cfg.n)));
  }
  QuantizedBasis basis;
  if (cfg.raster.enabled) {
    basis = quantized_basis(*lap);
  }

  for (const FlowKind kind : cfg.flows) {
    FlowRunResult run;
    run.kind = kind;
    run.directory = result.directory / std::string(to_string(kind));
    std::filesystem::create_directories(run.directory);

    IntegratorConfig ic = cfg.integrator;
    ic.h = cfg.h_for(kind);
    ic.traced = traced;
    const FlowSpec spec = make_flow_spec(kind, cfg.n, lap);

    const std::size_t report = std::max<std::size_t>(1, ic.steps / 10);
    ProgressFn progress;
    if (log) {
      progress = [&](const DiagnosticsRecord& r) {
        if (r.step % report == 0) {
          log(fmt::format("{}: step {} offdiag {:.3e} inversions {} drift {:.2e}", to_string(kind),
                          r.step, r.offdiag_norm, r.inversions, r.spectral_drift));
        }
      };
    }
    const auto start = std::chrono::steady_clock::now();
    run.trajectory = run_flow(result.initial, spec, ic, progress);
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    {
      std::ofstream out = open_out(run.directory / "trajectory.csv");
      write_trajectory_csv(out, run.trajectory, traced);
    }
    {
      std::ofstream out = open_out(run.directory / "spectrum.csv");
      write_spectrum_csv(out, run.trajectory);
    }
    if (cfg.raster.enabled) {
      const auto& snaps = run.trajectory.snapshot_steps;
      std::vector<std::size_t> wanted = cfg.raster.steps;
      if (wanted.empty()) {
        wanted = {snaps.front(), snaps.back()};
      }
      for (const std::size_t step : wanted) {
        const auto it = std::find(snaps.begin(), snaps.end(), step);
        if (it == snaps.end()) {
          throw ConfigError(fmt::format(
              "raster.steps: step {} is not a snapshot step (record_every = {})", step,
              ic.record_every));
        }
        const auto& snap = run.trajectory.snapshots[static_cast<std::size_t>(it - snaps.begin())];
        const SphereField field = matrix_to_field(snap, basis, {cfg.raster.nlat, cfg.raster.nlon});
        render_raster(field, run.directory / fmt::format("field_{:06d}.png", step),
                      cfg.raster.width, cfg.raster.height);
      }
    }
    const auto& last = run.trajectory.records.back();
    write_manifest(run.directory / "manifest.txt", cfg,
                   {fmt::format("flow={}", to_string(kind)), fmt::format("h={:.17g}", ic.h),
                    fmt::format("seconds={:.3f}", run.seconds),
                    fmt::format("initial_norm={:.17g}", run.trajectory.initial_norm),
                    fmt::format("final_offdiag_norm={:.17g}", last.offdiag_norm),
                    fmt::format("final_inversions={}", last.inversions),
                    fmt::format("final_spectral_drift={:.17g}", last.spectral_drift)});
    if (log) {
      log(fmt::format("{}: done in {:.1f} s, offdiag/|L0| = {:.3e}, inversions {}", to_string(kind),
                      run.seconds, last.offdiag_norm / run.trajectory.initial_norm,
                      last.inversions));
    }
    result.flows.push_back(std::move(run));
  }
  return result;
}

}  // namespace isoflow
