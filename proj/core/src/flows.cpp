#include "isoflow/flows.hpp"

#include <fmt/format.h>

#include "isoflow/errors.hpp"

namespace isoflow {

namespace {

// [diag(d), L]_ij = (d_i - d_j) L_ij.
Matrix diagonal_commutator(const Vector& d, const Matrix& l) {
  const Index n = l.rows();
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      out(i, j) = (d(i) - d(j)) * l(i, j);
    }
  }
  return out;
}

void require_potential(const Vector& d, Index n, const char* what) {
  if (d.size() != n) {
    throw DimensionError(fmt::format("{}: potential has length {}, state is {}x{}", what, d.size(),
                                     n, n));
  }
}

void require_laplacian(const DiscreteLaplacian* lap, Index n, const char* what) {
  if (lap == nullptr) {
    throw DomainError(fmt::format("{}: flow requires a discrete Laplacian", what));
  }
  if (lap->n() != n) {
    throw DimensionError(fmt::format("{}: Laplacian is {}x{}, state is {}x{}", what, lap->n(),
                                     lap->n(), n, n));
  }
}

}  // namespace

std::string_view to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::kToda:
      return "toda";
    case FlowKind::kIpm:
      return "ipm";
    case FlowKind::kDiagFlow:
      return "diagflow";
    case FlowKind::kQrIteration:
      return "qr";
  }
  return "unknown";
}

std::optional<FlowKind> parse_flow_kind(std::string_view name) {
  if (name == "toda") return FlowKind::kToda;
  if (name == "ipm") return FlowKind::kIpm;
  if (name == "diagflow") return FlowKind::kDiagFlow;
  if (name == "qr") return FlowKind::kQrIteration;
  return std::nullopt;
}

void FlowSpec::validate(Index n) const {
  switch (kind) {
    case FlowKind::kToda:
    case FlowKind::kQrIteration:
      require_potential(potential, n, "FlowSpec");
      break;
    case FlowKind::kIpm:
      require_potential(potential, n, "FlowSpec");
      require_laplacian(laplacian.get(), n, "FlowSpec");
      break;
    case FlowKind::kDiagFlow:
      require_laplacian(laplacian.get(), n, "FlowSpec");
      break;
  }
  if (potential.size() > 0 && !potential.allFinite()) {
    throw DomainError("FlowSpec: potential has non-finite entries");
  }
}

FlowSpec make_flow_spec(FlowKind kind, Index n, std::shared_ptr<const DiscreteLaplacian> laplacian) {
  FlowSpec spec;
  spec.kind = kind;
  spec.potential = potential_diagonal(n);
  if (kind == FlowKind::kIpm || kind == FlowKind::kDiagFlow) {
    spec.laplacian =
        laplacian ? std::move(laplacian)
                  : std::make_shared<const DiscreteLaplacian>(band_coefficients(build_generators(n)));
  }
  spec.validate(n);
  return spec;
}

Vector potential_diagonal(Index n) {
  if (n < 2) {
    throw DomainError(fmt::format("potential_diagonal: n must be >= 2, got {}", n));
  }
  Vector d(n);
  for (Index k = 0; k < n; ++k) {
    d(k) = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  return d;
}

SymmetricMatrix toda_rhs(const SymmetricMatrix& l, const Vector& d) {
  require_potential(d, l.n(), "toda_rhs");
  const Matrix dm = d.asDiagonal();
  return SymmetricMatrix(commutator(l.matrix(), commutator(l.matrix(), dm)));
}

SymmetricMatrix ipm_rhs(const SymmetricMatrix& l, const Vector& d, const DiscreteLaplacian& lap) {
  require_potential(d, l.n(), "ipm_rhs");
  require_laplacian(&lap, l.n(), "ipm_rhs");
  const Matrix dm = d.asDiagonal();
  const Matrix stream = lap.solve(commutator(dm, l.matrix()));
  return SymmetricMatrix(-commutator(stream, l.matrix()));
}

SymmetricMatrix diagflow_rhs(const SymmetricMatrix& l, const DiscreteLaplacian& lap) {
  require_laplacian(&lap, l.n(), "diagflow_rhs");
  const Matrix dm = l.diagonal().asDiagonal();
  const Matrix stream = lap.solve(commutator(dm, l.matrix()));
  return SymmetricMatrix(-commutator(stream, l.matrix()));
}

SkewMatrix generator(const SymmetricMatrix& l, const FlowSpec& spec) {
  const Index n = l.n();
  switch (spec.kind) {
    case FlowKind::kToda:
      require_potential(spec.potential, n, "generator");
      return SkewMatrix(diagonal_commutator(spec.potential, l.matrix()));
    case FlowKind::kIpm:
      require_potential(spec.potential, n, "generator");
      require_laplacian(spec.laplacian.get(), n, "generator");
      return SkewMatrix(-spec.laplacian->solve(diagonal_commutator(spec.potential, l.matrix())));
    case FlowKind::kDiagFlow:
      require_laplacian(spec.laplacian.get(), n, "generator");
      return SkewMatrix(-spec.laplacian->solve(diagonal_commutator(l.diagonal(), l.matrix())));
    case FlowKind::kQrIteration:
      break;
  }
  throw DomainError("generator: the QR iteration is a discrete map without a generator");
}

SymmetricMatrix bracket_action(const SkewMatrix& b, const SymmetricMatrix& l) {
  if (b.n() != l.n()) {
    throw DimensionError("bracket_action: dimension mismatch");
  }
  // LB = -(BL)^T for skew B and symmetric L, so [B, L] = BL + (BL)^T.
  Matrix bl = b.matrix() * l.matrix();
  Matrix out = bl + bl.transpose();
  return SymmetricMatrix(std::move(out));
}

SymmetricMatrix flow_rhs(const SymmetricMatrix& l, const FlowSpec& spec) {
  return bracket_action(generator(l, spec), l);
}

double lyapunov(const SymmetricMatrix& l, const FlowSpec& spec) {
  switch (spec.kind) {
    case FlowKind::kToda:
    case FlowKind::kIpm:
      require_potential(spec.potential, l.n(), "lyapunov");
      return spec.potential.dot(l.diagonal());
    case FlowKind::kDiagFlow:
      return 0.5 * l.diagonal().squaredNorm();
    case FlowKind::kQrIteration:
      require_potential(spec.potential, l.n(), "lyapunov");
      return -spec.potential.dot(l.diagonal());
  }
  return 0.0;
}

Matrix lyapunov_representer(const SymmetricMatrix& l, const FlowSpec& spec) {
  switch (spec.kind) {
    case FlowKind::kToda:
    case FlowKind::kIpm:
      return spec.potential.asDiagonal();
    case FlowKind::kDiagFlow:
      return l.diagonal().asDiagonal();
    case FlowKind::kQrIteration:
      return (-spec.potential).asDiagonal();
  }
  return Matrix::Zero(l.n(), l.n());
}

double inertia_norm_sq(const SkewMatrix& b, const FlowSpec& spec) {
  switch (spec.kind) {
    case FlowKind::kToda:
      return b.matrix().squaredNorm();
    case FlowKind::kIpm:
    case FlowKind::kDiagFlow:
      require_laplacian(spec.laplacian.get(), b.n(), "inertia_norm_sq");
      return -frobenius_inner(spec.laplacian->apply(b.matrix()), b.matrix());
    case FlowKind::kQrIteration:
      break;
  }
  throw DomainError("inertia_norm_sq: the QR iteration has no inertia operator");
}

Matrix inertia_inverse(const Matrix& x, const FlowSpec& spec) {
  switch (spec.kind) {
    case FlowKind::kToda:
      return x;
    case FlowKind::kIpm:
    case FlowKind::kDiagFlow:
      require_laplacian(spec.laplacian.get(), x.rows(), "inertia_inverse");
      return -spec.laplacian->solve(x);
    case FlowKind::kQrIteration:
      break;
  }
  throw DomainError("inertia_inverse: the QR iteration has no inertia operator");
}

SymmetricMatrix qr_step(const SymmetricMatrix& l, double h) {
  if (!(h > 0.0)) {
    throw DomainError("qr_step: h must be positive");
  }
  const Matrix e = matrix_exp(h * l.matrix());
  const QrFactors qr = householder_qr(e);
  Matrix next = qr.q.transpose() * l.matrix() * qr.q;
  return SymmetricMatrix(std::move(next));
}

}  // namespace isoflow
