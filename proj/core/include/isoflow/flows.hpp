#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "isoflow/matrix.hpp"
#include "isoflow/quantization.hpp"

namespace isoflow {

enum class FlowKind { kToda, kIpm, kDiagFlow, kQrIteration };

std::string_view to_string(FlowKind kind);
/// Accepts "toda", "ipm", "diagflow", "qr" (case-sensitive).
std::optional<FlowKind> parse_flow_kind(std::string_view name);

/// Which flow to run and the data it needs.
///
/// Toda and IPM require `potential`; IPM and DiagFlow require `laplacian`.
/// Toda uses identity inertia, IPM and DiagFlow use -Lap as inertia.
struct FlowSpec {
  FlowKind kind = FlowKind::kIpm;
  Vector potential;
  std::shared_ptr<const DiscreteLaplacian> laplacian;

  /// Throws DomainError/DimensionError if a kind-dependent field is missing
  /// or inconsistent with dimension n.
  void validate(Index n) const;
};

/// Builds a complete spec for dimension n: equidistant potential, and the
/// Laplacian when the kind needs one.
FlowSpec make_flow_spec(FlowKind kind, Index n,
                        std::shared_ptr<const DiscreteLaplacian> laplacian = nullptr);

/// d_k = -1 + 2k/(n-1): index 0 is the south pole, index n-1 the north pole.
Vector potential_diagonal(Index n);

/// [L, [L, D]].
SymmetricMatrix toda_rhs(const SymmetricMatrix& l, const Vector& d);

/// -[Lap^{-1}[D, L], L].
SymmetricMatrix ipm_rhs(const SymmetricMatrix& l, const Vector& d, const DiscreteLaplacian& lap);

/// -[Lap^{-1}[D(L), L], L] with D(L) the diagonal part of L.
SymmetricMatrix diagflow_rhs(const SymmetricMatrix& l, const DiscreteLaplacian& lap);

/// Skew B(L) with dL/dt = [B(L), L]:
/// Toda B = [D, L]; IPM B = -Lap^{-1}[D, L]; DiagFlow B = -Lap^{-1}[D(L), L].
/// Throws DomainError for kQrIteration, which is a discrete map.
SkewMatrix generator(const SymmetricMatrix& l, const FlowSpec& spec);

/// [B, L] for symmetric L and skew B; symmetric by construction.
SymmetricMatrix bracket_action(const SkewMatrix& b, const SymmetricMatrix& l);

/// Kind-dispatched right-hand side, equal to bracket_action(generator(L), L).
SymmetricMatrix flow_rhs(const SymmetricMatrix& l, const FlowSpec& spec);

/// Non-decreasing functional along the flow:
/// Toda/IPM trace(D L); DiagFlow (1/2) sum L_ii^2; QR -trace(D L)
/// (the QR map sorts the diagonal descending).
double lyapunov(const SymmetricMatrix& l, const FlowSpec& spec);

/// Gradient representer of the Lyapunov functional: D, D(L), or -D for QR.
Matrix lyapunov_representer(const SymmetricMatrix& l, const FlowSpec& spec);

/// Squared inertia norm <A B, B> of a generator: A = id for Toda,
/// A = -Lap for IPM/DiagFlow.
double inertia_norm_sq(const SkewMatrix& b, const FlowSpec& spec);

/// Applies A^{-1} to a skew matrix (identity or -Lap^{-1}).
Matrix inertia_inverse(const Matrix& x, const FlowSpec& spec);

/// One QR-algorithm step: exp(hL) = QR with positive diag(R), returns Q^T L Q.
SymmetricMatrix qr_step(const SymmetricMatrix& l, double h);

}  // namespace isoflow
