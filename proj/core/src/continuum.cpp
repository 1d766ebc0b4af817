#include "isoflow/continuum.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "isoflow/errors.hpp"

namespace isoflow {

namespace {

void require_grid_vector(const Grid1D& grid, const Vector& f, const char* what) {
  if (f.size() != grid.size) {
    throw DimensionError(fmt::format("{}: {} samples on a {}-node grid", what, f.size(), grid.size));
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

// Forward differences (phi_{j+1} - phi_j) / dz, j = 0..size-1, with the
// periodic offset phi_{size} = phi_0 + length.
Vector staggered_slope(const LagrangianState& s) {
  const Index n = s.grid.size;
  Vector d(n);
  for (Index j = 0; j < n; ++j) {
    const double next = j + 1 < n ? s.phi(j + 1) : s.phi(0) + s.grid.length();
    d(j) = (next - s.phi(j)) / s.grid.dz;
  }
  return d;
}

}  // namespace

Grid1D Grid1D::periodic(double zmin, double zmax, Index size) {
  Grid1D g;
  g.size = size;
  g.z0 = zmin;
  g.dz = size > 0 ? (zmax - zmin) / static_cast<double>(size) : 0.0;
  g.boundary = Boundary::kPeriodic;
  g.validate();
  return g;
}

Grid1D Grid1D::interval(double zmin, double zmax, Index size) {
  Grid1D g;
  g.size = size;
  g.z0 = zmin;
  g.dz = size > 1 ? (zmax - zmin) / static_cast<double>(size - 1) : 0.0;
  g.boundary = Boundary::kOneSided;
  g.validate();
  return g;
}

double Grid1D::length() const {
  return boundary == Boundary::kPeriodic ? static_cast<double>(size) * dz
                                         : static_cast<double>(size - 1) * dz;
}

void Grid1D::validate() const {
  if (size < 3) {
    throw DomainError(fmt::format("Grid1D: need at least 3 nodes, got {}", size));
  }
  if (!(dz > 0.0) || !std::isfinite(dz) || !std::isfinite(z0)) {
    throw DomainError(fmt::format("Grid1D: spacing must be positive and finite, got {}", dz));
  }
}

Vector centered_derivative(const Grid1D& grid, const Vector& f) {
  require_grid_vector(grid, f, "centered_derivative");
  const Index n = grid.size;
  const double inv = 1.0 / (2.0 * grid.dz);
  Vector d(n);
  for (Index j = 1; j + 1 < n; ++j) {
    d(j) = (f(j + 1) - f(j - 1)) * inv;
  }
  if (grid.boundary == Boundary::kPeriodic) {
    d(0) = (f(1) - f(n - 1)) * inv;
    d(n - 1) = (f(0) - f(n - 2)) * inv;
  } else {
    d(0) = (-3.0 * f(0) + 4.0 * f(1) - f(2)) * inv;
    d(n - 1) = (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) * inv;
  }
  return d;
}

double integrate(const Grid1D& grid, const Vector& f) {
  require_grid_vector(grid, f, "integrate");
  double sum = f.sum();
  if (grid.boundary == Boundary::kOneSided) {
    sum -= 0.5 * (f(0) + f(grid.size - 1));
  }
  return sum * grid.dz;
}

void AbState::validate() const {
  grid.validate();
  require_grid_vector(grid, a, "AbState");
  require_grid_vector(grid, b, "AbState");
  if (!a.allFinite() || !b.allFinite()) {
    throw NumericalError("AbState: non-finite samples");
  }
  if (a.minCoeff() < 0.0) {
    throw DomainError(fmt::format("AbState: a must be non-negative, min is {}", a.minCoeff()));
  }
}

AbRates ab_rhs(const AbState& s) {
  require_grid_vector(s.grid, s.a, "ab_rhs");
  require_grid_vector(s.grid, s.b, "ab_rhs");
  AbRates r;
  r.da = -s.a.cwiseProduct(centered_derivative(s.grid, s.b));
  r.db = -2.0 * centered_derivative(s.grid, s.a.cwiseAbs2());
  return r;
}

AbState step_ab(const AbState& s, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DomainError(fmt::format("step_ab: h must be positive, got {}", h));
  }
  s.validate();
  const double steep = centered_derivative(s.grid, s.b).cwiseAbs().maxCoeff();
  if (h * steep > kAbCflLimit) {
    throw NumericalError(fmt::format(
        "step_ab: h max|b_z| = {:.3e} exceeds {} (steepening / breakdown)", h * steep, kAbCflLimit));
  }
  auto shifted = [&s](const AbRates& k, double c) {
    AbState t{s.grid, s.a + c * k.da, s.b + c * k.db};
    return t;
  };
  const AbRates k1 = ab_rhs(s);
  const AbRates k2 = ab_rhs(shifted(k1, 0.5 * h));
  const AbRates k3 = ab_rhs(shifted(k2, 0.5 * h));
  const AbRates k4 = ab_rhs(shifted(k3, h));
  AbState out{s.grid, s.a + (h / 6.0) * (k1.da + 2.0 * k2.da + 2.0 * k3.da + k4.da),
              s.b + (h / 6.0) * (k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db)};
  if (!out.a.allFinite() || !out.b.allFinite()) {
    throw NumericalError("step_ab: non-finite state");
  }
  if (out.a.minCoeff() < 0.0) {
    throw NumericalError(fmt::format("step_ab: a became negative ({:.3e})", out.a.minCoeff()));
  }
  return out;
}

double j_integral(const AbState& s, int k) {
  if (k < 1) {
    throw DomainError(fmt::format("j_integral: k must be >= 1, got {}", k));
  }
  require_grid_vector(s.grid, s.a, "j_integral");
  require_grid_vector(s.grid, s.b, "j_integral");
  Vector density = Vector::Zero(s.grid.size);
  for (int j = 0; j <= k; j += 2) {
    const double cos_avg = binomial(j, j / 2) / std::pow(4.0, j / 2);
    const double c = binomial(k, j) * cos_avg * std::pow(2.0, j);
    for (Index i = 0; i < s.grid.size; ++i) {
      density(i) += c * std::pow(s.b(i), k - j) * std::pow(s.a(i), j);
    }
  }
  return integrate(s.grid, density);
}

void LagrangianState::validate() const {
  grid.validate();
  if (grid.boundary != Boundary::kPeriodic) {
    throw DomainError("LagrangianState: only periodic grids are supported");
  }
  require_grid_vector(grid, phi, "LagrangianState");
  require_grid_vector(grid, phidot, "LagrangianState");
  if (!phi.allFinite() || !phidot.allFinite()) {
    throw NumericalError("LagrangianState: non-finite samples");
  }
}

Vector lagrangian_rhs(const LagrangianState& s) {
  s.validate();
  const Vector slope = staggered_slope(s);
  if (slope.minCoeff() <= 0.0) {
    throw DomainError("lagrangian_rhs: phi is not strictly increasing");
  }
  const Vector e = (-2.0 * slope).array().exp();
  const Index n = s.grid.size;
  Vector acc(n);
  for (Index j = 0; j < n; ++j) {
    const double left = j > 0 ? e(j - 1) : e(n - 1);
    acc(j) = -2.0 * (e(j) - left) / s.grid.dz;
  }
  return acc;
}

LagrangianState step_lagrangian(const LagrangianState& s, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DomainError(fmt::format("step_lagrangian: h must be positive, got {}", h));
  }
  auto at = [&s](const Vector& dphi, const Vector& dvel, double c) {
    return LagrangianState{s.grid, s.phi + c * dphi, s.phidot + c * dvel};
  };
  const Vector v1 = s.phidot;
  const Vector a1 = lagrangian_rhs(s);
  const LagrangianState s2 = at(v1, a1, 0.5 * h);
  const Vector v2 = s2.phidot;
  const Vector a2 = lagrangian_rhs(s2);
  const LagrangianState s3 = at(v2, a2, 0.5 * h);
  const Vector v3 = s3.phidot;
  const Vector a3 = lagrangian_rhs(s3);
  const LagrangianState s4 = at(v3, a3, h);
  const Vector v4 = s4.phidot;
  const Vector a4 = lagrangian_rhs(s4);
  LagrangianState out{s.grid, s.phi + (h / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4),
                      s.phidot + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)};
  if (!out.phi.allFinite() || !out.phidot.allFinite()) {
    throw NumericalError("step_lagrangian: non-finite state");
  }
  return out;
}

AbState to_ab(const LagrangianState& s) {
  s.validate();
  const Index n = s.grid.size;
  const double len = s.grid.length();
  AbState out{s.grid, Vector(n), s.phidot};
  for (Index j = 0; j < n; ++j) {
    const double next = j + 1 < n ? s.phi(j + 1) : s.phi(0) + len;
    const double prev = j > 0 ? s.phi(j - 1) : s.phi(n - 1) - len;
    out.a(j) = std::exp(-(next - prev) / (2.0 * s.grid.dz));
  }
  return out;
}

double consistency_residual(const LagrangianState& init, double h, double t_end) {
  if (!(h > 0.0) || !(t_end >= 0.0)) {
    throw DomainError("consistency_residual: need h > 0 and t_end >= 0");
  }
  const auto steps = static_cast<std::size_t>(std::llround(t_end / h));
  LagrangianState lag = init;
  AbState ab = to_ab(init);
  for (std::size_t k = 0; k < steps; ++k) {
    lag = step_lagrangian(lag, h);
    ab = step_ab(ab, h);
  }
  const AbState mapped = to_ab(lag);
  return std::max((mapped.a - ab.a).cwiseAbs().maxCoeff(), (mapped.b - ab.b).cwiseAbs().maxCoeff());
}

void ContinuumConfig::validate() const {
  if (nodes < 3) {
    throw DomainError(fmt::format("ContinuumConfig: nodes must be >= 3, got {}", nodes));
  }
  if (!(zmax > zmin)) {
    throw DomainError("ContinuumConfig: zmax must exceed zmin");
  }
  if (!(amplitude >= 0.0) || !(width > 0.0)) {
    throw DomainError("ContinuumConfig: need amplitude >= 0 and width > 0");
  }
  if (!(h > 0.0) || !(t_end >= 0.0)) {
    throw DomainError("ContinuumConfig: need h > 0 and t_end >= 0");
  }
  if (record_every < 1) {
    throw DomainError("ContinuumConfig: record_every must be >= 1");
  }
}

AbState gaussian_bump(const ContinuumConfig& cfg) {
  cfg.validate();
  AbState s;
  s.grid = Grid1D::periodic(cfg.zmin, cfg.zmax, cfg.nodes);
  s.a.resize(cfg.nodes);
  s.b = Vector::Zero(cfg.nodes);
  const double center = 0.5 * (cfg.zmin + cfg.zmax);
  for (Index j = 0; j < cfg.nodes; ++j) {
    const double u = (s.grid.z(j) - center) / cfg.width;
    s.a(j) = cfg.amplitude * std::exp(-0.5 * u * u);
  }
  return s;
}

ContinuumRun evolve_ab(const AbState& init, double h, double t_end, std::size_t record_every) {
  if (record_every < 1) {
    throw DomainError("evolve_ab: record_every must be >= 1");
  }
  if (!(h > 0.0) || !(t_end >= 0.0)) {
    throw DomainError("evolve_ab: need h > 0 and t_end >= 0");
  }
  init.validate();
  const auto steps = static_cast<std::size_t>(std::llround(t_end / h));
  auto record = [](std::size_t step, double time, const AbState& s) {
    return ContinuumRecord{step,
                           time,
                           j_integral(s, 1),
                           j_integral(s, 2),
                           s.a.cwiseAbs().maxCoeff(),
                           s.b.cwiseAbs().maxCoeff()};
  };
  ContinuumRun run;
  AbState s = init;
  const double j2_0 = j_integral(s, 2);
  run.records.push_back(record(0, 0.0, s));
  for (std::size_t k = 1; k <= steps; ++k) {
    try {
      s = step_ab(s, h);
    } catch (const NumericalError& e) {
      throw StepError(fmt::format("evolve_ab: step {} failed: {}", k, e.what()), k);
    }
    const double j2 = j_integral(s, 2);
    const double denom = std::abs(j2_0) > 0.0 ? std::abs(j2_0) : 1.0;
    run.j2_drift = std::max(run.j2_drift, std::abs(j2 - j2_0) / denom);
    if (k % record_every == 0 || k == steps) {
      run.records.push_back(record(k, static_cast<double>(k) * h, s));
    }
  }
  run.final_state = std::move(s);
  return run;
}

}  // namespace isoflow
