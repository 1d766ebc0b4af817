#include "isoflow/quantization.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "isoflow/errors.hpp"

namespace isoflow {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Output entry (i, j) of the Laplacian for an input given by `w(i, j)`,
// which must return 0 outside [0, n)^2.
template <class Get>
double laplacian_entry(const SpinGenerators& gen, const std::vector<double>& perp, Get&& w,
                       Index i, Index j) {
  const double dmu = gen.j3[static_cast<std::size_t>(i)] - gen.j3[static_cast<std::size_t>(j)];
  const double diag = dmu * dmu + perp[static_cast<std::size_t>(i)] +
                      perp[static_cast<std::size_t>(j)];
  return -diag * w(i, j) + gen.raising(i + 1) * gen.raising(j + 1) * w(i + 1, j + 1) +
         gen.raising(i) * gen.raising(j) * w(i - 1, j - 1);
}

// Diagonal of (J1^2 + J2^2) = (1/2)(J+ J- + J- J+): (c_{k+1}^2 + c_k^2) / 2.
std::vector<double> perpendicular_casimir(const SpinGenerators& gen) {
  std::vector<double> perp(static_cast<std::size_t>(gen.n));
  for (Index k = 0; k < gen.n; ++k) {
    const double up = gen.raising(k + 1);
    const double down = gen.raising(k);
    perp[static_cast<std::size_t>(k)] = 0.5 * (up * up + down * down);
  }
  return perp;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> bytes{};
  for (int b = 0; b < 8; ++b) {
    bytes[static_cast<std::size_t>(b)] = static_cast<unsigned char>(v >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 8)) {
    throw FormatError("laplacian cache: truncated file");
  }
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) {
    v |= static_cast<std::uint64_t>(bytes[static_cast<std::size_t>(b)]) << (8 * b);
  }
  return v;
}

}  // namespace

SpinGenerators build_generators(Index n) {
  if (n < 2) {
    throw DomainError(fmt::format("build_generators: n must be >= 2, got {}", n));
  }
  SpinGenerators gen;
  gen.n = n;
  gen.spin = 0.5 * static_cast<double>(n - 1);
  gen.j3.resize(static_cast<std::size_t>(n));
  gen.jplus_super.resize(static_cast<std::size_t>(n - 1));
  for (Index k = 0; k < n; ++k) {
    gen.j3[static_cast<std::size_t>(k)] = gen.spin - static_cast<double>(k);
  }
  for (Index k = 1; k < n; ++k) {
    gen.jplus_super[static_cast<std::size_t>(k - 1)] =
        std::sqrt(static_cast<double>(k) * static_cast<double>(n - k));
  }
  return gen;
}

Matrix laplacian_apply(const SpinGenerators& gen, const Matrix& w) {
  require_square(w, "laplacian_apply");
  const Index n = gen.n;
  if (w.rows() != n) {
    throw DimensionError(
        fmt::format("laplacian_apply: generators are {}x{}, input is {}x{}", n, n, w.rows(), n));
  }
  const auto perp = perpendicular_casimir(gen);
  auto get = [&](Index i, Index j) -> double {
    return (i < 0 || j < 0 || i >= n || j >= n) ? 0.0 : w(i, j);
  };
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      out(i, j) = laplacian_entry(gen, perp, get, i, j);
    }
  }
  return out;
}

DiscreteLaplacian band_coefficients(const SpinGenerators& gen) {
  const Index n = gen.n;
  const auto perp = perpendicular_casimir(gen);
  std::vector<Band> bands(static_cast<std::size_t>(n));
  for (Index m = 0; m < n; ++m) {
    const Index len = n - m;
    Band& band = bands[static_cast<std::size_t>(m)];
    band.main.resize(static_cast<std::size_t>(len));
    band.off.resize(static_cast<std::size_t>(len - 1));
    for (Index p = 0; p < len; ++p) {
      // Unit matrix at (p, p+m); its image lives on (p-1..p+1, ...+m).
      auto unit = [p, m](Index i, Index j) -> double { return (i == p && j == p + m) ? 1.0 : 0.0; };
      band.main[static_cast<std::size_t>(p)] = laplacian_entry(gen, perp, unit, p, p + m);
      if (p + 1 < len) {
        band.off[static_cast<std::size_t>(p)] = laplacian_entry(gen, perp, unit, p + 1, p + 1 + m);
      }
    }
  }
  return DiscreteLaplacian(std::move(bands));
}

DiscreteLaplacian::DiscreteLaplacian(std::vector<Band> bands) : bands_(std::move(bands)) {
  n_ = static_cast<Index>(bands_.size());
  if (n_ < 1) {
    throw DomainError("DiscreteLaplacian: no bands");
  }
  for (Index m = 0; m < n_; ++m) {
    const Band& band = bands_[static_cast<std::size_t>(m)];
    const auto len = static_cast<std::size_t>(n_ - m);
    if (band.main.size() != len || band.off.size() != len - 1) {
      throw DimensionError(fmt::format("DiscreteLaplacian: band {} has lengths {}/{}, expected {}/{}",
                                       m, band.main.size(), band.off.size(), len, len - 1));
    }
  }
  factor();
}

void DiscreteLaplacian::factor() {
  const Index n = n_;
  sub_.setZero(n, n);
  inv_pivot_.setZero(n, n);
  cprime_.setZero(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      const Index m = r > c ? r - c : c - r;
      const Index p = r < c ? r : c;
      const Index len = n - m;
      const Band& band = bands_[static_cast<std::size_t>(m)];
      // Offset 0 is singular: pin its last entry and fix the mean afterwards.
      if (m == 0 && p == len - 1 && n > 1) {
        sub_(r, c) = 0.0;
        inv_pivot_(r, c) = 0.0;
        cprime_(r, c) = 0.0;
        continue;
      }
      const double sub = p > 0 ? band.off[static_cast<std::size_t>(p - 1)] : 0.0;
      const double coupling = p > 0 ? sub * cprime_(r - 1, c - 1) : 0.0;
      const double main = band.main[static_cast<std::size_t>(p)];
      const double pivot = main - coupling;
      if (!(std::abs(pivot) > 16.0 * kEps * (std::abs(main) + std::abs(coupling)))) {
        throw NumericalError(fmt::format(
            "DiscreteLaplacian: zero pivot at offset {} position {} (internal failure)", m, p));
      }
      const bool has_super = p + 1 < len && !(m == 0 && p + 1 == len - 1);
      sub_(r, c) = sub;
      inv_pivot_(r, c) = 1.0 / pivot;
      cprime_(r, c) = has_super ? band.off[static_cast<std::size_t>(p)] / pivot : 0.0;
    }
  }
}

Matrix DiscreteLaplacian::apply(const Matrix& w) const {
  require_square(w, "DiscreteLaplacian::apply");
  if (w.rows() != n_) {
    throw DimensionError("DiscreteLaplacian::apply: dimension mismatch");
  }
  const Index n = n_;
  Matrix out(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      const Index m = r > c ? r - c : c - r;
      const Index p = r < c ? r : c;
      const Band& band = bands_[static_cast<std::size_t>(m)];
      double v = band.main[static_cast<std::size_t>(p)] * w(r, c);
      if (p > 0) {
        v += band.off[static_cast<std::size_t>(p - 1)] * w(r - 1, c - 1);
      }
      if (p + 1 < n - m) {
        v += band.off[static_cast<std::size_t>(p)] * w(r + 1, c + 1);
      }
      out(r, c) = v;
    }
  }
  return out;
}

Matrix DiscreteLaplacian::solve(const Matrix& p) const {
  require_square(p, "poisson_solve");
  if (p.rows() != n_) {
    throw DimensionError(
        fmt::format("poisson_solve: Laplacian is {}x{}, right-hand side is {}x{}", n_, n_,
                    p.rows(), p.cols()));
  }
  const double tr = p.trace();
  if (std::abs(tr) > kPoissonTraceTolerance * p.norm()) {
    throw DomainError(fmt::format(
        "poisson_solve: right-hand side has trace {:.3e}; the identity spans the kernel", tr));
  }
  const Index n = n_;
  Matrix w(n, n);
  // Forward elimination, all offsets at once, streaming rows.
  for (Index c = 0; c < n; ++c) {
    w(0, c) = p(0, c) * inv_pivot_(0, c);
  }
  for (Index r = 1; r < n; ++r) {
    const double* prev = w.row(r - 1).data();
    const double* rhs = p.row(r).data();
    const double* sub = sub_.row(r).data();
    const double* inv = inv_pivot_.row(r).data();
    double* cur = w.row(r).data();
    cur[0] = rhs[0] * inv[0];
    for (Index c = 1; c < n; ++c) {
      cur[c] = (rhs[c] - sub[c] * prev[c - 1]) * inv[c];
    }
  }
  // Back substitution.
  for (Index r = n - 2; r >= 0; --r) {
    const double* next = w.row(r + 1).data();
    const double* cp = cprime_.row(r).data();
    double* cur = w.row(r).data();
    for (Index c = 0; c + 1 < n; ++c) {
      cur[c] -= cp[c] * next[c + 1];
    }
  }
  const double mean = w.trace() / static_cast<double>(n);
  w.diagonal().array() -= mean;
  return w;
}

Matrix poisson_solve(const DiscreteLaplacian& lap, const Matrix& p) { return lap.solve(p); }

QuantizedBasis::QuantizedBasis(const DiscreteLaplacian& lap) : n_(lap.n()) {
  vectors_.resize(static_cast<std::size_t>(n_));
  eigenvalues_.resize(static_cast<std::size_t>(n_));
  for (Index m = 0; m < n_; ++m) {
    const Band& band = lap.band(m);
    const Index len = n_ - m;
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(band.main.data(), len);
    Eigen::VectorXd off = Eigen::Map<const Eigen::VectorXd>(band.off.data(), len - 1);
    Eigen::MatrixXd vecs;
    Eigen::VectorXd vals;
    if (len == 1) {
      vecs = Eigen::MatrixXd::Ones(1, 1);
      vals = diag;
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
      solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
      if (solver.info() != Eigen::Success) {
        throw NumericalError(fmt::format("quantized_basis: eigensolver failed on offset {}", m));
      }
      vecs = solver.eigenvectors();
      vals = solver.eigenvalues();
    }
    // Ascending eigenvalues run from l = n-1 down to l = m; store by l - m.
    Matrix& out = vectors_[static_cast<std::size_t>(m)];
    Vector& ev = eigenvalues_[static_cast<std::size_t>(m)];
    out.resize(len, len);
    ev.resize(len);
    for (Index j = 0; j < len; ++j) {
      const Index col = len - 1 - j;
      Vector v = vecs.col(j);
      Index last = len - 1;
      while (last > 0 && std::abs(v(last)) <= 1e-14) {
        --last;
      }
      if (v(last) < 0.0) {
        v = -v;
      }
      out.col(col) = v;
      ev(col) = vals(j);
    }
  }
}

std::size_t QuantizedBasis::size() const noexcept {
  return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_ + 1) / 2;
}

double QuantizedBasis::eigenvalue(Index l, Index m) const {
  if (m < 0 || m > l || l >= n_) {
    throw DomainError(fmt::format("QuantizedBasis: invalid (l, m) = ({}, {})", l, m));
  }
  return eigenvalues_[static_cast<std::size_t>(m)](l - m);
}

Vector QuantizedBasis::band_vector(Index l, Index m) const {
  if (m < 0 || m > l || l >= n_) {
    throw DomainError(fmt::format("QuantizedBasis: invalid (l, m) = ({}, {})", l, m));
  }
  return vectors_[static_cast<std::size_t>(m)].col(l - m);
}

Matrix QuantizedBasis::matrix(Index l, Index m) const {
  const Vector v = band_vector(l, m);
  Matrix t = Matrix::Zero(n_, n_);
  if (m == 0) {
    t.diagonal() = v;
    return t;
  }
  const double scale = 1.0 / std::sqrt(2.0);
  for (Index p = 0; p < v.size(); ++p) {
    t(p, p + m) = scale * v(p);
    t(p + m, p) = scale * v(p);
  }
  return t;
}

Matrix QuantizedBasis::coefficients(const SymmetricMatrix& l) const {
  if (l.n() != n_) {
    throw DimensionError(fmt::format("QuantizedBasis: basis is {}x{}, matrix is {}x{}", n_, n_,
                                     l.n(), l.n()));
  }
  Matrix c = Matrix::Zero(n_, n_);
  for (Index m = 0; m < n_; ++m) {
    const Index len = n_ - m;
    Vector entries(len);
    for (Index p = 0; p < len; ++p) {
      entries(p) = l(p, p + m);
    }
    if (m > 0) {
      entries *= std::sqrt(2.0);
    }
    const Vector proj = vectors_[static_cast<std::size_t>(m)].transpose() * entries;
    for (Index k = 0; k < len; ++k) {
      c(m + k, m) = proj(k);
    }
  }
  return c;
}

QuantizedBasis quantized_basis(const DiscreteLaplacian& lap) { return QuantizedBasis(lap); }

void save_laplacian_cache(const std::filesystem::path& path, const DiscreteLaplacian& lap) {
  static_assert(sizeof(double) == 8);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw FormatError(fmt::format("laplacian cache: cannot open '{}' for writing", path.string()));
  }
  out.write("ZQB1", 4);
  put_u64(out, static_cast<std::uint64_t>(lap.n()));
  for (const Band& band : lap.bands()) {
    for (const auto* arr : {&band.main, &band.off}) {
      for (double v : *arr) {
        put_u64(out, std::bit_cast<std::uint64_t>(v));
      }
    }
  }
  if (!out) {
    throw FormatError(fmt::format("laplacian cache: write failed for '{}'", path.string()));
  }
}

DiscreteLaplacian load_laplacian_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError(fmt::format("laplacian cache: cannot open '{}'", path.string()));
  }
  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, "ZQB1", 4) != 0) {
    throw FormatError("laplacian cache: bad magic, expected ZQB1");
  }
  const std::uint64_t n = get_u64(in);
  if (n == 0 || n > (1u << 16)) {
    throw FormatError(fmt::format("laplacian cache: implausible dimension {}", n));
  }
  std::vector<Band> bands(n);
  for (std::uint64_t m = 0; m < n; ++m) {
    bands[m].main.resize(n - m);
    bands[m].off.resize(n - m - 1);
    for (auto* arr : {&bands[m].main, &bands[m].off}) {
      for (double& v : *arr) {
        v = std::bit_cast<double>(get_u64(in));
      }
    }
  }
  return DiscreteLaplacian(std::move(bands));
}

}  // namespace isoflow
