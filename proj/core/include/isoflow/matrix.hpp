#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace isoflow {

/// Dense row-major double matrix used for every state and operator.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Largest tolerated relative asymmetry ||(X - X^T)/2|| / ||X|| on construction.
inline constexpr double kSymmetryDefectTolerance = 1e-10;

/// Real symmetric n x n matrix.
///
/// Construction symmetrizes the input via (X + X^T)/2 and records the
/// removed antisymmetric part as the asymmetry defect. A defect larger than
/// kSymmetryDefectTolerance * ||X|| (Frobenius) or a non-finite entry is an
/// error: integrator drift must surface here instead of being absorbed.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(Matrix entries);

  static SymmetricMatrix zero(Index n);
  static SymmetricMatrix identity(Index n);
  static SymmetricMatrix from_diagonal(const Vector& diagonal);

  Index n() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }
  double asymmetry_defect() const noexcept { return defect_; }

  Vector diagonal() const { return m_.diagonal(); }
  double trace() const { return m_.trace(); }
  double norm() const { return m_.norm(); }

 private:
  Matrix m_;
  double defect_ = 0.0;
};

/// Real skew-symmetric n x n matrix (zero diagonal), built like
/// SymmetricMatrix from (X - X^T)/2 with the same defect gate.
class SkewMatrix {
 public:
  SkewMatrix() = default;
  explicit SkewMatrix(Matrix entries);

  static SkewMatrix zero(Index n);

  Index n() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }
  double asymmetry_defect() const noexcept { return defect_; }
  double norm() const { return m_.norm(); }

 private:
  Matrix m_;
  double defect_ = 0.0;
};

/// Eigenvalues (ascending) and the worst eigenpair residual max |S v - l v|.
struct SpectrumReport {
  std::vector<double> eigenvalues;
  double residual = 0.0;
  int sweeps = 0;
};

struct QrFactors {
  Matrix q;
  Matrix r;
};

void require_square(const Matrix& x, const char* what);
void require_same_shape(const Matrix& x, const Matrix& y, const char* what);

/// XY - YX.
Matrix commutator(const Matrix& x, const Matrix& y);

/// sum_ij X_ij Y_ij.
double frobenius_inner(const Matrix& x, const Matrix& y);

/// Cyclic Jacobi eigensolver; the reference spectrum oracle.
///
/// Sweeps until the off-diagonal Frobenius norm is at most tol * ||S||.
/// Throws NumericalError after kMaxJacobiSweeps sweeps.
SpectrumReport jacobi_spectrum(const SymmetricMatrix& s, double tol = 1e-13);
inline constexpr int kMaxJacobiSweeps = 60;

/// Householder QR with R's diagonal made strictly positive, so the
/// factorization of a nonsingular matrix is unique and deterministic.
QrFactors householder_qr(const Matrix& m);

/// Scaling and squaring: scale until ||X/2^s||_1 <= kExpScaleTarget, sum the
/// Taylor series to order kExpTaylorOrder, square s times.
Matrix matrix_exp(const Matrix& x);
inline constexpr double kExpScaleTarget = 0.5;
inline constexpr int kExpTaylorOrder = 13;

/// Thomas elimination for a tridiagonal system. `sub[i]` couples row i+1 to
/// column i, `super[i]` couples row i to column i+1.
std::vector<double> tridiag_solve(std::span<const double> sub, std::span<const double> main,
                                  std::span<const double> super, std::span<const double> rhs);

/// Matrix text format: a line with N, then N rows of N decimal scalars.
Matrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const Matrix& m);

}  // namespace isoflow
