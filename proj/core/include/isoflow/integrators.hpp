#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "isoflow/diagnostics.hpp"
#include "isoflow/flows.hpp"
#include "isoflow/matrix.hpp"

namespace isoflow {

enum class Stepper { kIsospectralMidpoint, kRk4 };

std::string_view to_string(Stepper stepper);
/// Accepts "isomp" and "rk4".
std::optional<Stepper> parse_stepper(std::string_view name);

struct IntegratorConfig {
  double h = 0.1;
  /// Stage iteration stops once ||X_{k+1} - X_k||_F <= fp_tol * max(1, ||L||_F).
  double fp_tol = 1e-12;
  int fp_maxit = 100;
  std::size_t steps = 0;
  std::size_t record_every = 1;
  Stepper stepper = Stepper::kIsospectralMidpoint;
  /// Diagonal indices copied into every diagnostics record.
  std::vector<Index> traced;

  void validate() const;
};

using GeneratorFn = std::function<SkewMatrix(const SymmetricMatrix&)>;
using RhsFn = std::function<SymmetricMatrix(const SymmetricMatrix&)>;

struct StageStats {
  int iterations = 0;
  double last_update = 0.0;
};

/// Isospectral midpoint step.
///
/// Solves L = (I - h/2 B) X (I + h/2 B) with B = gen(X) by fixed-point
/// iteration from X = L, then returns (I + h/2 B) X (I - h/2 B). Because X is
/// recomputed from L with the final B, the result is exactly the conjugation
/// of L by the Cayley factor (I + h/2 B)(I - h/2 B)^{-1}. Any nonzero h is
/// accepted (negative h steps backwards). Throws ConvergenceError if the
/// stage does not converge within cfg.fp_maxit iterations.
SymmetricMatrix isomp_step(const SymmetricMatrix& l, const GeneratorFn& gen,
                           const IntegratorConfig& cfg, StageStats* stats = nullptr);

/// Classical fourth-order Runge-Kutta on the matrix ODE dL/dt = rhs(L).
SymmetricMatrix rk4_step(const SymmetricMatrix& l, const RhsFn& rhs, double h);

using ProgressFn = std::function<void(const DiagnosticsRecord&)>;

/// Steps the flow `cfg.steps` times (qr_step for kQrIteration, otherwise
/// cfg.stepper), recording diagnostics at every step. Numerical failures are
/// rethrown as StepError carrying the failing step index.
Trajectory run_flow(const SymmetricMatrix& l0, const FlowSpec& spec, const IntegratorConfig& cfg,
                    const ProgressFn& progress = {});

}  // namespace isoflow
