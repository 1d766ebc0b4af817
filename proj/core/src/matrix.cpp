#include "isoflow/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "isoflow/errors.hpp"

namespace isoflow {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Splits x into its (anti)symmetric part and returns the norm of the
// discarded half, checked against the defect gate.
double split_and_check(Matrix& x, bool keep_symmetric, const char* what) {
  require_square(x, what);
  if (!x.allFinite()) {
    throw NumericalError(fmt::format("{}: non-finite entry", what));
  }
  const double scale = x.norm();
  Matrix sym = 0.5 * (x + x.transpose());
  Matrix anti = 0.5 * (x - x.transpose());
  const double defect = keep_symmetric ? anti.norm() : sym.norm();
  if (defect > kSymmetryDefectTolerance * scale) {
    throw NumericalError(fmt::format("{}: defect {:.3e} exceeds {:.1e} * |X| = {:.3e}", what,
                                     defect, kSymmetryDefectTolerance,
                                     kSymmetryDefectTolerance * scale));
  }
  x = keep_symmetric ? std::move(sym) : std::move(anti);
  return defect;
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(Matrix entries) : m_(std::move(entries)) {
  defect_ = split_and_check(m_, true, "SymmetricMatrix");
}

SymmetricMatrix SymmetricMatrix::zero(Index n) { return SymmetricMatrix(Matrix::Zero(n, n)); }

SymmetricMatrix SymmetricMatrix::identity(Index n) {
  return SymmetricMatrix(Matrix::Identity(n, n));
}

SymmetricMatrix SymmetricMatrix::from_diagonal(const Vector& diagonal) {
  Matrix m = Matrix::Zero(diagonal.size(), diagonal.size());
  m.diagonal() = diagonal;
  return SymmetricMatrix(std::move(m));
}

SkewMatrix::SkewMatrix(Matrix entries) : m_(std::move(entries)) {
  defect_ = split_and_check(m_, false, "SkewMatrix");
}

SkewMatrix SkewMatrix::zero(Index n) { return SkewMatrix(Matrix::Zero(n, n)); }

void require_square(const Matrix& x, const char* what) {
  if (x.rows() != x.cols()) {
    throw DimensionError(fmt::format("{}: expected a square matrix, got {}x{}", what, x.rows(),
                                     x.cols()));
  }
}

void require_same_shape(const Matrix& x, const Matrix& y, const char* what) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionError(fmt::format("{}: shape mismatch {}x{} vs {}x{}", what, x.rows(), x.cols(),
                                     y.rows(), y.cols()));
  }
}

Matrix commutator(const Matrix& x, const Matrix& y) {
  require_square(x, "commutator");
  require_same_shape(x, y, "commutator");
  Matrix out = x * y;
  out.noalias() -= y * x;
  return out;
}

double frobenius_inner(const Matrix& x, const Matrix& y) {
  require_same_shape(x, y, "frobenius_inner");
  return x.cwiseProduct(y).sum();
}

SpectrumReport jacobi_spectrum(const SymmetricMatrix& s, double tol) {
  if (!(tol > 0.0)) {
    throw DomainError("jacobi_spectrum: tol must be positive");
  }
  const Index n = s.n();
  Matrix a = s.matrix();
  Matrix v = Matrix::Identity(n, n);
  const double scale = s.norm();

  auto off_norm = [&] {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        acc += 2.0 * a(i, j) * a(i, j);
      }
    }
    return std::sqrt(acc);
  };

  SpectrumReport report;
  int sweep = 0;
  for (;; ++sweep) {
    if (off_norm() <= tol * scale) {
      break;
    }
    if (sweep >= kMaxJacobiSweeps) {
      throw NumericalError(fmt::format(
          "jacobi_spectrum: no convergence after {} sweeps (off-diagonal {:.3e}, target {:.3e})",
          sweep, off_norm(), tol * scale));
    }
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) {
          continue;
        }
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Negligible against both diagonal entries: rotating cannot change them.
        if (sweep > 3 && std::abs(apq) < 0.25 * kEps * std::min(std::abs(app), std::abs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::hypot(1.0, t);
        const double sn = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    order[static_cast<std::size_t>(i)] = i;
  }
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) < a(j, j); });

  report.sweeps = sweep;
  report.eigenvalues.reserve(static_cast<std::size_t>(n));
  double residual = 0.0;
  for (Index idx : order) {
    const double lambda = a(idx, idx);
    report.eigenvalues.push_back(lambda);
    const Vector vec = v.col(idx);
    residual = std::max(residual, (s.matrix() * vec - lambda * vec).norm());
  }
  report.residual = residual;
  return report;
}

QrFactors householder_qr(const Matrix& m) {
  require_square(m, "householder_qr");
  const Index n = m.rows();
  Matrix r = m;
  std::vector<Vector> reflectors;
  reflectors.reserve(static_cast<std::size_t>(n));
  const double singular_floor = static_cast<double>(n) * kEps * m.norm();

  for (Index k = 0; k < n; ++k) {
    Vector x = r.block(k, k, n - k, 1);
    const double xnorm = x.norm();
    if (xnorm <= singular_floor) {
      throw NumericalError(
          fmt::format("householder_qr: matrix is singular to working precision (column {})", k));
    }
    const double alpha = x(0) >= 0.0 ? -xnorm : xnorm;
    x(0) -= alpha;
    const double vnorm = x.norm();
    if (vnorm > 0.0) {
      x /= vnorm;
      auto block = r.block(k, k, n - k, n - k);
      const Eigen::RowVectorXd proj = x.transpose() * block;
      block.noalias() -= 2.0 * x * proj;
    }
    reflectors.push_back(std::move(x));
  }

  Matrix q = Matrix::Identity(n, n);
  for (Index k = n - 1; k >= 0; --k) {
    const Vector& v = reflectors[static_cast<std::size_t>(k)];
    if (v.squaredNorm() == 0.0) {
      continue;
    }
    auto block = q.block(k, k, n - k, n - k);
    const Eigen::RowVectorXd proj = v.transpose() * block;
    block.noalias() -= 2.0 * v * proj;
  }

  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      r(i, j) = 0.0;
    }
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  return {std::move(q), std::move(r)};
}

Matrix matrix_exp(const Matrix& x) {
  require_square(x, "matrix_exp");
  if (!x.allFinite()) {
    throw NumericalError("matrix_exp: non-finite input");
  }
  const Index n = x.rows();
  const double norm1 = x.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > kExpScaleTarget) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kExpScaleTarget)));
  }
  const Matrix y = x * std::ldexp(1.0, -squarings);
  const Matrix eye = Matrix::Identity(n, n);

  Matrix e = eye + y / static_cast<double>(kExpTaylorOrder);
  for (int k = kExpTaylorOrder - 1; k >= 1; --k) {
    Matrix next = y * e;
    next /= static_cast<double>(k);
    next += eye;
    e = std::move(next);
  }
  for (int i = 0; i < squarings; ++i) {
    e = (e * e).eval();
  }
  if (!e.allFinite()) {
    throw NumericalError(fmt::format("matrix_exp: overflow (|X|_1 = {:.3e})", norm1));
  }
  return e;
}

std::vector<double> tridiag_solve(std::span<const double> sub, std::span<const double> main,
                                  std::span<const double> super, std::span<const double> rhs) {
  const std::size_t n = main.size();
  if (rhs.size() != n || (n > 0 && (sub.size() != n - 1 || super.size() != n - 1))) {
    throw DimensionError(fmt::format(
        "tridiag_solve: inconsistent lengths sub={} main={} super={} rhs={}", sub.size(), n,
        super.size(), rhs.size()));
  }
  std::vector<double> cprime(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double coupling = i > 0 ? sub[i - 1] * cprime[i - 1] : 0.0;
    const double denom = main[i] - coupling;
    const double scale = std::abs(main[i]) + std::abs(coupling);
    if (!(std::abs(denom) > 16.0 * kEps * scale) || !std::isfinite(denom)) {
      throw NumericalError(fmt::format("tridiag_solve: zero pivot at row {}", i));
    }
    cprime[i] = i + 1 < n ? super[i] / denom : 0.0;
    x[i] = (rhs[i] - (i > 0 ? sub[i - 1] * x[i - 1] : 0.0)) / denom;
  }
  for (std::size_t i = n; i-- > 1;) {
    x[i - 1] -= cprime[i - 1] * x[i];
  }
  return x;
}

}  // namespace isoflow
