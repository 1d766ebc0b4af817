#include "isoflow/integrators.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "isoflow/errors.hpp"

namespace isoflow {

std::string_view to_string(Stepper stepper) {
  switch (stepper) {
    case Stepper::kIsospectralMidpoint:
      return "isomp";
    case Stepper::kRk4:
      return "rk4";
  }
  return "unknown";
}

std::optional<Stepper> parse_stepper(std::string_view name) {
  if (name == "isomp") return Stepper::kIsospectralMidpoint;
  if (name == "rk4") return Stepper::kRk4;
  return std::nullopt;
}

void IntegratorConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DomainError(fmt::format("IntegratorConfig: h must be positive and finite, got {}", h));
  }
  if (!(fp_tol > 0.0)) {
    throw DomainError(fmt::format("IntegratorConfig: fp_tol must be positive, got {}", fp_tol));
  }
  if (fp_maxit < 1) {
    throw DomainError(fmt::format("IntegratorConfig: fp_maxit must be >= 1, got {}", fp_maxit));
  }
  if (record_every < 1) {
    throw DomainError("IntegratorConfig: record_every must be >= 1");
  }
}

SymmetricMatrix isomp_step(const SymmetricMatrix& l, const GeneratorFn& gen,
                           const IntegratorConfig& cfg, StageStats* stats) {
  if (cfg.h == 0.0 || !std::isfinite(cfg.h)) {
    throw DomainError(fmt::format("isomp_step: h must be nonzero and finite, got {}", cfg.h));
  }
  if (!(cfg.fp_tol > 0.0) || cfg.fp_maxit < 1) {
    throw DomainError("isomp_step: fp_tol must be positive and fp_maxit >= 1");
  }
  const Index n = l.n();
  const double half = 0.5 * cfg.h;
  const double tol = cfg.fp_tol * std::max(1.0, l.norm());
  const Matrix id = Matrix::Identity(n, n);

  SymmetricMatrix x = l;
  Matrix b;
  double update = 0.0;
  int it = 0;
  bool converged = false;
  while (it < cfg.fp_maxit) {
    ++it;
    b = gen(x).matrix();
    Eigen::PartialPivLU<Matrix> lu(id - half * b);
    const Matrix y = lu.solve(l.matrix());
    Matrix next = lu.solve(y.transpose());
    if (!next.allFinite()) {
      throw NumericalError(fmt::format("isomp_step: non-finite stage after {} iterations", it));
    }
    SymmetricMatrix xn(std::move(next));
    update = (xn.matrix() - x.matrix()).norm();
    x = std::move(xn);
    if (update <= tol) {
      converged = true;
      break;
    }
  }
  if (stats != nullptr) {
    stats->iterations = it;
    stats->last_update = update;
  }
  if (!converged) {
    throw ConvergenceError(
        fmt::format("isomp_step: stage did not converge in {} iterations (update {:.3e}, tol {:.3e})",
                    it, update, tol),
        it);
  }
  const Matrix a = id + half * b;
  return SymmetricMatrix(a * x.matrix() * a.transpose());
}

SymmetricMatrix rk4_step(const SymmetricMatrix& l, const RhsFn& rhs, double h) {
  if (h == 0.0 || !std::isfinite(h)) {
    throw DomainError(fmt::format("rk4_step: h must be nonzero and finite, got {}", h));
  }
  const Matrix& y = l.matrix();
  const Matrix k1 = rhs(l).matrix();
  const Matrix k2 = rhs(SymmetricMatrix(y + 0.5 * h * k1)).matrix();
  const Matrix k3 = rhs(SymmetricMatrix(y + 0.5 * h * k2)).matrix();
  const Matrix k4 = rhs(SymmetricMatrix(y + h * k3)).matrix();
  return SymmetricMatrix(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

Trajectory run_flow(const SymmetricMatrix& l0, const FlowSpec& spec, const IntegratorConfig& cfg,
                    const ProgressFn& progress) {
  cfg.validate();
  spec.validate(l0.n());
  for (const Index i : cfg.traced) {
    if (i < 0 || i >= l0.n()) {
      throw DomainError(
          fmt::format("run_flow: traced index {} out of range for n = {}", i, l0.n()));
    }
  }

  Trajectory traj;
  traj.reference = jacobi_spectrum(l0);
  traj.initial_norm = l0.norm();

  const GeneratorFn gen = [&spec](const SymmetricMatrix& x) { return generator(x, spec); };
  const RhsFn rhs = [&spec](const SymmetricMatrix& x) { return flow_rhs(x, spec); };
  auto advance = [&](const SymmetricMatrix& x) {
    if (spec.kind == FlowKind::kQrIteration) {
      return qr_step(x, cfg.h);
    }
    if (cfg.stepper == Stepper::kRk4) {
      return rk4_step(x, rhs, cfg.h);
    }
    return isomp_step(x, gen, cfg);
  };
  auto snapshot = [&](std::size_t step, const SymmetricMatrix& x) {
    traj.times.push_back(static_cast<double>(step) * cfg.h);
    traj.snapshot_steps.push_back(step);
    traj.snapshots.push_back(x);
  };
  auto record = [&](std::size_t step, const SymmetricMatrix& x) {
    traj.records.push_back(
        make_record(step, static_cast<double>(step) * cfg.h, x, spec, traj.reference, cfg.traced));
    if (progress) {
      progress(traj.records.back());
    }
  };

  SymmetricMatrix l = l0;
  snapshot(0, l);
  record(0, l);
  for (std::size_t k = 1; k <= cfg.steps; ++k) {
    try {
      l = advance(l);
      if (!l.matrix().allFinite()) {
        throw NumericalError("non-finite state");
      }
      record(k, l);
    } catch (const StepError&) {
      throw;
    } catch (const NumericalError& e) {
      throw StepError(fmt::format("run_flow: step {} failed: {}", k, e.what()), k);
    }
    if (k % cfg.record_every == 0 || k == cfg.steps) {
      snapshot(k, l);
    }
  }
  traj.final_state = l;
  return traj;
}

}  // namespace isoflow
