#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "isoflow/matrix.hpp"

namespace isoflow {

/// Spin-(n-1)/2 representation in angular-momentum normalization.
///
/// J3 = diag(mu_k) with mu_k = s - k, and the raising operator J+ has
/// entries c_k = sqrt(k (n - k)) at position (k-1, k) for k = 1..n-1.
struct SpinGenerators {
  Index n = 0;
  double spin = 0.0;
  std::vector<double> j3;
  std::vector<double> jplus_super;

  /// c_k for k in [0, n]; zero at both ends.
  double raising(Index k) const {
    return (k <= 0 || k >= n) ? 0.0 : jplus_super[static_cast<std::size_t>(k - 1)];
  }
};

SpinGenerators build_generators(Index n);

/// Discrete Laplacian  Lap W = -sum_a [J_a, [J_a, W]], evaluated in real
/// arithmetic. The J1/J2 double commutators combine into
/// (1/2)([J+, [J-, W]] + [J-, [J+, W]]), so each output entry (i, j) only
/// touches W(i, j), W(i+1, j+1) and W(i-1, j-1). Spectrum: -l(l+1).
Matrix laplacian_apply(const SpinGenerators& gen, const Matrix& w);

/// Symmetric tridiagonal restriction of the Laplacian to one diagonal offset.
struct Band {
  std::vector<double> main;
  std::vector<double> off;
};

/// Per-offset band tables of the Laplacian plus a prefactored Poisson solver.
///
/// Offset m >= 0 covers both W(p, p+m) and W(p+m, p); the operator commutes
/// with transposition so one table serves both. The band at offset 0 is
/// singular (kernel = identity); all others are negative definite.
class DiscreteLaplacian {
 public:
  DiscreteLaplacian() = default;

  /// Assembles from explicit band tables (e.g. a cache file).
  explicit DiscreteLaplacian(std::vector<Band> bands);

  Index n() const noexcept { return n_; }
  const Band& band(Index offset) const { return bands_[static_cast<std::size_t>(offset)]; }
  const std::vector<Band>& bands() const noexcept { return bands_; }

  /// Applies the stored band tables; reproduces laplacian_apply.
  Matrix apply(const Matrix& w) const;

  /// Unique traceless W with Lap W = P. O(n^2).
  Matrix solve(const Matrix& p) const;

 private:
  void factor();

  Index n_ = 0;
  std::vector<Band> bands_;
  // Thomas factorization laid out like the matrix so that the elimination
  // streams row by row: entry (r, c) is eliminated against (r-1, c-1).
  Matrix sub_;
  Matrix inv_pivot_;
  Matrix cprime_;
};

/// Reads off the band tables by probing the Laplacian with unit matrices.
DiscreteLaplacian band_coefficients(const SpinGenerators& gen);

/// Relative trace tolerance for the solvability check.
inline constexpr double kPoissonTraceTolerance = 1e-10;

/// Lap W = P for traceless P; throws DomainError when trace(P) is not zero.
Matrix poisson_solve(const DiscreteLaplacian& lap, const Matrix& p);

/// Frobenius-orthonormal eigenbasis T_{l,m} of the Laplacian restricted to
/// real symmetric matrices, l = 0..n-1, m = 0..l.
///
/// Each band is diagonalized separately; the eigenvector for degree l in
/// band m is stored with its last nonzero entry (the north end) positive.
class QuantizedBasis {
 public:
  QuantizedBasis() = default;
  explicit QuantizedBasis(const DiscreteLaplacian& lap);

  Index n() const noexcept { return n_; }
  /// Number of basis matrices, n(n+1)/2.
  std::size_t size() const noexcept;

  double eigenvalue(Index l, Index m) const;
  /// Entries of T_{l,m} along offset m, length n - m.
  Vector band_vector(Index l, Index m) const;
  /// Materialized symmetric basis matrix T_{l,m}.
  Matrix matrix(Index l, Index m) const;

  /// Table C with C(l, m) = <T_{l,m}, L> for l >= m, zero above.
  Matrix coefficients(const SymmetricMatrix& l) const;

 private:
  Index n_ = 0;
  std::vector<Matrix> vectors_;
  std::vector<Vector> eigenvalues_;
};

QuantizedBasis quantized_basis(const DiscreteLaplacian& lap);

/// Equiangular latitude-longitude grid size.
struct GridResolution {
  Index nlat = 181;
  Index nlon = 360;
};

/// Scalar samples on an equiangular grid. Row i is colatitude
/// pi * i / (nlat - 1) (row 0 = north pole); column j is longitude
/// -pi + 2 pi j / nlon.
struct SphereField {
  Index nlat = 0;
  Index nlon = 0;
  std::vector<double> colatitude;
  std::vector<double> longitude;
  Matrix values;

  /// Bilinear interpolation, periodic in longitude.
  double sample(double colat, double lon) const;
};

/// Real orthonormal spherical harmonic, even in longitude:
/// Y_{l,0} = N P_l(cos t),  Y_{l,m} = sqrt(2) N P_l^m(cos t) cos(m phi).
/// No Condon-Shortley phase, so P_l^m > 0 near the north pole.
double real_harmonic(Index l, Index m, double colat, double lon);

/// Evaluates sum_{l,m} C(l,m) Y_{l,m} on the grid.
SphereField synthesize_field(const Matrix& coefficients, GridResolution res);

/// Expands L in T_{l,m} and evaluates the matching harmonics on the grid.
SphereField matrix_to_field(const SymmetricMatrix& l, const QuantizedBasis& basis,
                            GridResolution res = {});

/// Binary band-table cache: "ZQB1", uint64 n, then every band's main and
/// off arrays in offset order, all little-endian.
void save_laplacian_cache(const std::filesystem::path& path, const DiscreteLaplacian& lap);
DiscreteLaplacian load_laplacian_cache(const std::filesystem::path& path);

}  // namespace isoflow
