#pragma once

#include <cstddef>
#include <vector>

#include "isoflow/matrix.hpp"

namespace isoflow {

enum class Boundary { kPeriodic, kOneSided };

/// Uniform nodes z_j = z0 + j dz, j = 0..size-1. A periodic grid identifies
/// z_size with z_0, so its length is size * dz.
struct Grid1D {
  Index size = 0;
  double z0 = 0.0;
  double dz = 1.0;
  Boundary boundary = Boundary::kPeriodic;

  static Grid1D periodic(double zmin, double zmax, Index size);
  static Grid1D interval(double zmin, double zmax, Index size);

  double z(Index j) const { return z0 + static_cast<double>(j) * dz; }
  double length() const;
  void validate() const;
};

/// Second-order centered derivative; one-sided second-order stencils at the
/// ends of a non-periodic grid.
Vector centered_derivative(const Grid1D& grid, const Vector& f);

/// Trapezoid rule (the plain Riemann sum on periodic grids).
double integrate(const Grid1D& grid, const Vector& f);

/// Dispersionless Toda fields a(z) >= 0, b(z).
struct AbState {
  Grid1D grid;
  Vector a;
  Vector b;

  void validate() const;
};

struct AbRates {
  Vector da;
  Vector db;
};

/// (-a b_z, -2 (a^2)_z).
AbRates ab_rhs(const AbState& s);

/// RK4 step of ab_rhs. Throws NumericalError when h max|b_z| > 0.5 (gradient
/// steepening), when a turns negative, or on non-finite values.
AbState step_ab(const AbState& s, double h);
inline constexpr double kAbCflLimit = 0.5;

/// J_k = int <(b + 2a cos t)^k>_t dz, with the average over t taken exactly
/// (<cos^{2m}> = C(2m, m) / 4^m). J_2 = int (b^2 + 2a^2) dz.
double j_integral(const AbState& s, int k);

/// Lagrangian form phi(z, t) of the same system on a periodic grid, where
/// phi - z is periodic. Requires discrete phi' > 0.
struct LagrangianState {
  Grid1D grid;
  Vector phi;
  Vector phidot;

  void validate() const;
};

/// phi'' = -2 d/dz exp(-2 phi') on the compact staggered stencil:
/// acc_j = -2 (e_{j+1/2} - e_{j-1/2}) / dz, e = exp(-2 (phi_{j+1} - phi_j) / dz).
/// Throws DomainError if phi is not strictly increasing.
Vector lagrangian_rhs(const LagrangianState& s);

/// RK4 step of (phi, phidot)' = (phidot, lagrangian_rhs).
LagrangianState step_lagrangian(const LagrangianState& s, double h);

/// a = exp(-phi') (centered phi'), b = phidot.
AbState to_ab(const LagrangianState& s);

/// Evolves `init` in Lagrangian form and its image under to_ab in (a, b)
/// form with the same step h up to t_end, and returns the sup-norm distance
/// max(|a_L - a|, |b_L - b|) between the two at t_end.
double consistency_residual(const LagrangianState& init, double h, double t_end);

/// Default continuum scenario: periodic [zmin, zmax), Gaussian a, zero b.
struct ContinuumConfig {
  Index nodes = 256;
  double zmin = -10.0;
  double zmax = 10.0;
  double amplitude = 1.0;
  double width = 1.0;
  double h = 1e-3;
  double t_end = 0.5;
  std::size_t record_every = 10;

  void validate() const;
};

AbState gaussian_bump(const ContinuumConfig& cfg);

struct ContinuumRecord {
  std::size_t step = 0;
  double time = 0.0;
  double j1 = 0.0;
  double j2 = 0.0;
  double sup_a = 0.0;
  double sup_b = 0.0;
};

struct ContinuumRun {
  std::vector<ContinuumRecord> records;
  AbState final_state;
  /// max_t |J_2(t) - J_2(0)| / |J_2(0)| over recorded times.
  double j2_drift = 0.0;
};

/// Steps round(t_end / h) times; records every `record_every` steps and at the end.
ContinuumRun evolve_ab(const AbState& init, double h, double t_end, std::size_t record_every);

}  // namespace isoflow
