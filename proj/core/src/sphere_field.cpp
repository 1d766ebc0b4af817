#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "isoflow/errors.hpp"
#include "isoflow/quantization.hpp"

namespace isoflow {

namespace {

// Orthonormal associated Legendre values pbar_{l,m}(cos t) for l = m..lmax,
// without the Condon-Shortley phase. `pmm` is pbar_{m,m} at this point.
void legendre_column(Index m, Index lmax, double x, double pmm, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(lmax - m + 1), 0.0);
  out[0] = pmm;
  if (lmax == m) {
    return;
  }
  const double md = static_cast<double>(m);
  out[1] = std::sqrt(2.0 * md + 3.0) * x * pmm;
  for (Index l = m + 2; l <= lmax; ++l) {
    const double ld = static_cast<double>(l);
    const double a = std::sqrt((4.0 * ld * ld - 1.0) / (ld * ld - md * md));
    const double b = std::sqrt(((ld - 1.0) * (ld - 1.0) - md * md) /
                               (4.0 * (ld - 1.0) * (ld - 1.0) - 1.0));
    const auto k = static_cast<std::size_t>(l - m);
    out[k] = a * (x * out[k - 1] - b * out[k - 2]);
  }
}

double next_sectoral(double prev, Index m, double sin_t) {
  const double md = static_cast<double>(m);
  return std::sqrt((2.0 * md + 1.0) / (2.0 * md)) * sin_t * prev;
}

}  // namespace

double real_harmonic(Index l, Index m, double colat, double lon) {
  if (l < 0 || m < 0 || m > l) {
    throw DomainError(fmt::format("real_harmonic: invalid (l, m) = ({}, {})", l, m));
  }
  const double x = std::cos(colat);
  const double s = std::sin(colat);
  double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (Index k = 1; k <= m; ++k) {
    pmm = next_sectoral(pmm, k, s);
  }
  std::vector<double> col;
  legendre_column(m, l, x, pmm, col);
  const double p = col.back();
  return m == 0 ? p : std::sqrt(2.0) * p * std::cos(static_cast<double>(m) * lon);
}

SphereField synthesize_field(const Matrix& coefficients, GridResolution res) {
  if (res.nlat < 2 || res.nlon < 2) {
    throw DomainError(
        fmt::format("synthesize_field: resolution must be at least 2x2, got {}x{}", res.nlat,
                    res.nlon));
  }
  require_square(coefficients, "synthesize_field");
  const Index lmax = coefficients.rows() - 1;
  SphereField field;
  field.nlat = res.nlat;
  field.nlon = res.nlon;
  field.colatitude.resize(static_cast<std::size_t>(res.nlat));
  field.longitude.resize(static_cast<std::size_t>(res.nlon));
  for (Index i = 0; i < res.nlat; ++i) {
    field.colatitude[static_cast<std::size_t>(i)] =
        std::numbers::pi * static_cast<double>(i) / static_cast<double>(res.nlat - 1);
  }
  for (Index j = 0; j < res.nlon; ++j) {
    field.longitude[static_cast<std::size_t>(j)] =
        -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) /
                                static_cast<double>(res.nlon);
  }

  Matrix cos_table(res.nlon, lmax + 1);
  for (Index j = 0; j < res.nlon; ++j) {
    for (Index m = 0; m <= lmax; ++m) {
      cos_table(j, m) = std::cos(static_cast<double>(m) * field.longitude[static_cast<std::size_t>(j)]);
    }
  }

  field.values.setZero(res.nlat, res.nlon);
  std::vector<double> col;
  Vector zonal_parts(lmax + 1);
  for (Index i = 0; i < res.nlat; ++i) {
    const double t = field.colatitude[static_cast<std::size_t>(i)];
    const double x = std::cos(t);
    const double s = std::sin(t);
    double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    for (Index m = 0; m <= lmax; ++m) {
      if (m > 0) {
        pmm = next_sectoral(pmm, m, s);
      }
      legendre_column(m, lmax, x, pmm, col);
      double acc = 0.0;
      for (Index l = m; l <= lmax; ++l) {
        acc += coefficients(l, m) * col[static_cast<std::size_t>(l - m)];
      }
      zonal_parts(m) = m == 0 ? acc : std::sqrt(2.0) * acc;
    }
    field.values.row(i) = (cos_table * zonal_parts).transpose();
  }
  return field;
}

SphereField matrix_to_field(const SymmetricMatrix& l, const QuantizedBasis& basis,
                            GridResolution res) {
  if (res.nlat < 2 || res.nlon < 2) {
    throw DomainError(
        fmt::format("matrix_to_field: resolution must be at least 2x2, got {}x{}", res.nlat,
                    res.nlon));
  }
  return synthesize_field(basis.coefficients(l), res);
}

double SphereField::sample(double colat, double lon) const {
  const double u = std::clamp(colat / std::numbers::pi, 0.0, 1.0) * static_cast<double>(nlat - 1);
  double v = (lon + std::numbers::pi) / (2.0 * std::numbers::pi) * static_cast<double>(nlon);
  v = std::fmod(v, static_cast<double>(nlon));
  if (v < 0.0) {
    v += static_cast<double>(nlon);
  }
  const auto i0 = std::min(static_cast<Index>(u), nlat - 2);
  const double fu = u - static_cast<double>(i0);
  const auto j0 = std::min(static_cast<Index>(v), nlon - 1);
  const Index j1 = (j0 + 1) % nlon;
  const double fv = v - static_cast<double>(j0);
  const double top = (1.0 - fv) * values(i0, j0) + fv * values(i0, j1);
  const double bottom = (1.0 - fv) * values(i0 + 1, j0) + fv * values(i0 + 1, j1);
  return (1.0 - fu) * top + fu * bottom;
}

}  // namespace isoflow
