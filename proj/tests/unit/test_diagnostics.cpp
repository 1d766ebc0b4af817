#include <gtest/gtest.h>

#include <cmath>

#include "isoflow/diagnostics.hpp"
#include "isoflow/errors.hpp"
#include "isoflow/integrators.hpp"
#include "oracles.hpp"

namespace isoflow {
namespace {

using testing::random_symmetric;

std::uint64_t brute_inversions(const std::vector<double>& v) {
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) count += v[i] > v[j] ? 1 : 0;
  }
  return count;
}

SymmetricMatrix random_tridiag(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = u(rng);
  for (Index i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = u(rng);
  return SymmetricMatrix(m);
}

TEST(OffdiagNorm, Examples) {
  EXPECT_EQ(offdiag_norm(SymmetricMatrix::from_diagonal(Vector::LinSpaced(4, -1.0, 2.0))), 0.0);
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  EXPECT_DOUBLE_EQ(offdiag_norm(SymmetricMatrix(m)), std::sqrt(2.0));
}

TEST(InversionCount, ExamplesAndBruteForce) {
  EXPECT_EQ(inversion_count(std::vector<double>{1, 2, 3}), 0u);
  EXPECT_EQ(inversion_count(std::vector<double>{3, 2, 1}), 3u);
  EXPECT_EQ(inversion_count(std::vector<double>{2, 1, 3}), 1u);
  EXPECT_EQ(inversion_count(std::vector<double>{}), 0u);
  EXPECT_EQ(inversion_count(std::vector<double>{1, 1, 1}), 0u);
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<int> u(0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(200);
    for (auto& x : v) x = u(rng);
    EXPECT_EQ(inversion_count(v), brute_inversions(v));
  }
}

TEST(SpectralDrift, Examples) {
  std::mt19937_64 rng(52);
  const SymmetricMatrix l = random_symmetric(20, rng);
  const SpectrumReport ref = jacobi_spectrum(l);
  EXPECT_LE(spectral_drift(l, ref), 1e-13);
  const Matrix q = testing::random_orthogonal(20, rng);
  EXPECT_LE(spectral_drift(SymmetricMatrix(Matrix(q * l.matrix() * q.transpose())), ref), 1e-12);

  const FlowSpec spec = make_flow_spec(FlowKind::kToda, 20);
  const RhsFn rhs = [&](const SymmetricMatrix& x) { return flow_rhs(x, spec); };
  EXPECT_GT(spectral_drift(rk4_step(l, rhs, 0.5), ref), 1e-8);
  EXPECT_THROW(spectral_drift(SymmetricMatrix::zero(3), ref), DimensionError);
}

TEST(SpectralDrift, FastEigenvaluesAgreeWithJacobi) {
  std::mt19937_64 rng(53);
  const SymmetricMatrix l = random_symmetric(30, rng);
  const auto fast = fast_eigenvalues(l);
  const auto oracle = jacobi_spectrum(l).eigenvalues;
  for (std::size_t i = 0; i < fast.size(); ++i) EXPECT_NEAR(fast[i], oracle[i], 1e-12 * l.norm());
}

TEST(ConservedTraces, ExamplesAndInvariance) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = -1.0;
  d(1, 1) = 1.0;
  EXPECT_DOUBLE_EQ(conserved_traces(SymmetricMatrix(d), 2)[0], 1.0);
  for (const double t : conserved_traces(SymmetricMatrix::zero(4), 4)) EXPECT_EQ(t, 0.0);
  EXPECT_THROW(conserved_traces(SymmetricMatrix::zero(4), 1), DomainError);

  std::mt19937_64 rng(54);
  const SymmetricMatrix l = random_symmetric(12, rng);
  const auto ev = jacobi_spectrum(l).eigenvalues;
  const auto traces = conserved_traces(l, 5);
  for (int k = 2; k <= 5; ++k) {
    double sum = 0.0;
    for (const double e : ev) sum += std::pow(e, k);
    EXPECT_NEAR(traces[static_cast<std::size_t>(k - 2)], sum / k, 1e-11 * std::pow(l.norm(), k));
  }
  const Matrix q = testing::random_orthogonal(12, rng);
  const auto rotated = conserved_traces(SymmetricMatrix(Matrix(q * l.matrix() * q.transpose())), 5);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    EXPECT_NEAR(rotated[i], traces[i], 1e-12 * std::pow(l.norm(), static_cast<double>(i + 2)));
  }
}

TEST(MakeRecord, TracesMatchConservedTraces) {
  std::mt19937_64 rng(55);
  const SymmetricMatrix l = random_symmetric(9, rng);
  const FlowSpec spec = make_flow_spec(FlowKind::kIpm, 9);
  const std::vector<Index> traced{0, 4, 8};
  const DiagnosticsRecord r = make_record(3, 0.3, l, spec, jacobi_spectrum(l), traced);
  const auto want = conserved_traces(l, 4);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(r.traces[static_cast<std::size_t>(k)], want[static_cast<std::size_t>(k)],
                1e-12 * std::pow(l.norm(), k + 2));
  }
  EXPECT_EQ(r.traced_diagonals, (std::vector<double>{l(0, 0), l(4, 4), l(8, 8)}));
  EXPECT_EQ(r.step, 3u);
  EXPECT_DOUBLE_EQ(r.lyapunov, lyapunov(l, spec));
  EXPECT_GT(r.generator_norm_sq, 0.0);
  EXPECT_LE(r.inversions, 36u);
}

TEST(OrthogonalityResidual, BothInertiaChoices) {
  std::mt19937_64 rng(56);
  const FlowSpec toda = make_flow_spec(FlowKind::kToda, 8);
  const FlowSpec ipm = make_flow_spec(FlowKind::kIpm, 16);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = orthogonality_residual(random_symmetric(8, rng), toda);
    ASSERT_TRUE(a.has_value());
    EXPECT_LE(*a, 1e-12);
    const auto b = orthogonality_residual(random_symmetric(16, rng), ipm);
    ASSERT_TRUE(b.has_value());
    EXPECT_LE(*b, 1e-11);
  }
  const SymmetricMatrix d = SymmetricMatrix::from_diagonal(Vector::LinSpaced(8, -1.0, 3.0));
  EXPECT_FALSE(orthogonality_residual(d, toda).has_value());
  EXPECT_FALSE(orthogonality_residual(SymmetricMatrix::from_diagonal(Vector::LinSpaced(16, 0.0, 1.0)), ipm)
                   .has_value());
  EXPECT_THROW(orthogonality_residual(d, make_flow_spec(FlowKind::kQrIteration, 8)), DomainError);
}

TEST(ContractionCheck, StationaryTrajectoryHasZeroSlack) {
  const SymmetricMatrix d = SymmetricMatrix::from_diagonal(Vector::LinSpaced(6, -1.0, 1.0));
  const FlowSpec spec = make_flow_spec(FlowKind::kIpm, 6);
  IntegratorConfig cfg;
  cfg.h = 0.5;
  cfg.steps = 20;
  const Trajectory t = run_flow(d, spec, cfg);
  EXPECT_EQ(contraction_check(t, spec), 0.0);
}

TEST(ContractionCheck, HoldsAlongGradientFlowsAndConvergesFromBelow) {
  std::mt19937_64 rng(57);
  const Index n = 32;
  const SymmetricMatrix l0 = random_tridiag(n, rng);
  const double scale = l0.norm() * l0.norm();
  for (const FlowKind k : {FlowKind::kIpm, FlowKind::kToda}) {
    const FlowSpec spec = make_flow_spec(k, n);
    IntegratorConfig cfg;
    cfg.h = k == FlowKind::kIpm ? 0.5 : 0.05;
    cfg.steps = k == FlowKind::kIpm ? 1000 : 400;
    cfg.record_every = cfg.steps;
    const Trajectory t = run_flow(l0, spec, cfg);
    const double s1 = contraction_check(t, spec, 1);
    const double s2 = contraction_check(t, spec, 2);
    const double s4 = contraction_check(t, spec, 4);
    EXPECT_GE(s1, -1e-6 * scale) << to_string(k);
    EXPECT_LE(s4, s2 + 1e-12 * scale) << to_string(k);
    EXPECT_LE(s2, s1 + 1e-12 * scale) << to_string(k);
  }
}

TEST(ContractionCheck, RejectsRisingEnergyAndQr) {
  std::mt19937_64 rng(58);
  const SymmetricMatrix l0 = random_symmetric(5, rng);
  const FlowSpec spec = make_flow_spec(FlowKind::kToda, 5);
  IntegratorConfig cfg;
  cfg.h = 0.05;
  cfg.steps = 10;
  Trajectory t = run_flow(l0, spec, cfg);
  t.records[5].lyapunov -= 1.0;
  EXPECT_THROW(contraction_check(t, spec), NumericalError);
  EXPECT_THROW(contraction_check(t, make_flow_spec(FlowKind::kQrIteration, 5)), DomainError);
  EXPECT_THROW(contraction_check(t, spec, 0), DomainError);
}

}  // namespace
}  // namespace isoflow
