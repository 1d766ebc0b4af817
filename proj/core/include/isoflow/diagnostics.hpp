#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "isoflow/flows.hpp"
#include "isoflow/matrix.hpp"

namespace isoflow {

/// Per-step measurements along a trajectory.
struct DiagnosticsRecord {
  std::size_t step = 0;
  double time = 0.0;
  double offdiag_norm = 0.0;
  std::uint64_t inversions = 0;
  double lyapunov = 0.0;
  double spectral_drift = 0.0;
  /// I_k = trace(L^k)/k for k = 2, 3, 4.
  std::array<double, 3> traces{};
  std::vector<double> traced_diagonals;
  /// <A B, B> for the generator at this state; NaN for the QR map.
  double generator_norm_sq = 0.0;
};

/// Output of run_flow.
///
/// `records` has one entry per step including step 0. Snapshots are taken at
/// step 0, every `record_every` steps, and at the final step, so their count
/// is floor(steps / record_every) + 1, plus one if the last step is off-stride.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::size_t> snapshot_steps;
  std::vector<SymmetricMatrix> snapshots;
  std::vector<DiagnosticsRecord> records;
  SymmetricMatrix final_state;
  /// Jacobi spectrum of the initial state.
  SpectrumReport reference;
  double initial_norm = 0.0;
};

/// Frobenius norm of L minus its diagonal part.
double offdiag_norm(const SymmetricMatrix& l);

/// Number of pairs i < j with values[i] > values[j].
std::uint64_t inversion_count(std::span<const double> values);

/// Ascending eigenvalues via Householder tridiagonalization; used for
/// per-step drift where running the Jacobi oracle every step is too slow.
std::vector<double> fast_eigenvalues(const SymmetricMatrix& l);

/// max_i |lambda_i(L) - ref_i| / max_i |ref_i| over ascending spectra.
/// Falls back to the absolute gap when the reference spectrum is zero.
double spectral_drift(const SymmetricMatrix& l, const SpectrumReport& ref);
double spectral_drift(std::span<const double> eigenvalues, std::span<const double> ref);

/// (1/k) trace(L^k) for k = 2..kmax.
std::vector<double> conserved_traces(const SymmetricMatrix& l, int kmax);

/// Cosine between the double-bracket direction [B, L] and A^{-1} B, where
/// B = [A^{-1} L, L] is the Euler-Arnold direction of the quadratic energy
/// <L, A^{-1} L> and A is the spec's inertia (identity for Toda, -Lap for
/// IPM and DiagFlow). Zero in exact arithmetic; nullopt when either
/// direction vanishes. Throws DomainError for the QR map.
std::optional<double> orthogonality_residual(const SymmetricMatrix& l, const FlowSpec& spec);

/// Contraction slack min_k [t_k (E_0 - E_k) - P(t_k)^2] with E = -lyapunov
/// and P(t) the trapezoid-rule path length of ||B||_A. Uses every
/// `stride`-th record. Throws NumericalError if E rises by more than
/// 1e-10 ||L0||^2 between used records.
double contraction_check(const Trajectory& traj, const FlowSpec& spec, std::size_t stride = 1);

/// Builds the record for state L at (step, time).
DiagnosticsRecord make_record(std::size_t step, double time, const SymmetricMatrix& l,
                              const FlowSpec& spec, const SpectrumReport& ref,
                              std::span<const Index> traced);

}  // namespace isoflow
