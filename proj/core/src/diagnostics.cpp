#include "isoflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "isoflow/errors.hpp"

namespace isoflow {

namespace {

std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                          std::size_t hi) {
  if (hi - lo < 2) {
    return 0;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      count += mid - i;
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi), v.begin() + static_cast<std::ptrdiff_t>(lo));
  return count;
}

}  // namespace

double offdiag_norm(const SymmetricMatrix& l) {
  const double total = l.matrix().squaredNorm();
  const double diag = l.matrix().diagonal().squaredNorm();
  return std::sqrt(std::max(0.0, total - diag));
}

std::uint64_t inversion_count(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::vector<double> buf(v.size());
  return merge_count(v, buf, 0, v.size());
}

std::vector<double> fast_eigenvalues(const SymmetricMatrix& l) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(l.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("fast_eigenvalues: eigensolver did not converge");
  }
  const Vector& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectral_drift(std::span<const double> eigenvalues, std::span<const double> ref) {
  if (eigenvalues.size() != ref.size()) {
    throw DimensionError(fmt::format("spectral_drift: {} eigenvalues vs {} reference",
                                     eigenvalues.size(), ref.size()));
  }
  double gap = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    gap = std::max(gap, std::abs(eigenvalues[i] - ref[i]));
    scale = std::max(scale, std::abs(ref[i]));
  }
  return scale > 0.0 ? gap / scale : gap;
}

double spectral_drift(const SymmetricMatrix& l, const SpectrumReport& ref) {
  const std::vector<double> ev = fast_eigenvalues(l);
  return spectral_drift(ev, ref.eigenvalues);
}

std::vector<double> conserved_traces(const SymmetricMatrix& l, int kmax) {
  if (kmax < 2) {
    throw DomainError(fmt::format("conserved_traces: kmax must be >= 2, got {}", kmax));
  }
  std::vector<double> out;
  Matrix power = l.matrix();
  for (int k = 2; k <= kmax; ++k) {
    power = power * l.matrix();
    out.push_back(power.trace() / static_cast<double>(k));
  }
  return out;
}

std::optional<double> orthogonality_residual(const SymmetricMatrix& l, const FlowSpec& spec) {
  if (spec.kind == FlowKind::kQrIteration) {
    throw DomainError("orthogonality_residual: the QR iteration has no inertia operator");
  }
  spec.validate(l.n());
  // The identity spans the kernel of the Laplacian and commutes with L, so
  // projecting it out before applying A^{-1} leaves [A^{-1}L, L] unchanged.
  Matrix traceless = l.matrix();
  traceless.diagonal().array() -= l.trace() / static_cast<double>(l.n());
  const Matrix c = inertia_inverse(traceless, spec);
  const SkewMatrix b(commutator(c, l.matrix()));
  const Matrix direction = inertia_inverse(b.matrix(), spec);
  const SymmetricMatrix gradient = bracket_action(b, l);
  const double nd = direction.norm();
  const double ng = gradient.norm();
  if (nd == 0.0 || ng == 0.0) {
    return std::nullopt;
  }
  return std::abs(frobenius_inner(gradient.matrix(), direction)) / (nd * ng);
}

double contraction_check(const Trajectory& traj, const FlowSpec& spec, std::size_t stride) {
  if (spec.kind == FlowKind::kQrIteration) {
    throw DomainError("contraction_check: the QR iteration has no generator");
  }
  if (stride == 0) {
    throw DomainError("contraction_check: stride must be positive");
  }
  if (traj.records.empty()) {
    throw DomainError("contraction_check: empty trajectory");
  }
  const double scale = traj.initial_norm * traj.initial_norm;
  const auto& recs = traj.records;
  const double e0 = -recs.front().lyapunov;
  double e_prev = e0;
  double t_prev = recs.front().time;
  double speed_prev = std::sqrt(std::max(0.0, recs.front().generator_norm_sq));
  double path = 0.0;
  double slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = stride; k < recs.size(); k += stride) {
    const DiagnosticsRecord& r = recs[k];
    const double e = -r.lyapunov;
    if (e - e_prev > 1e-10 * scale) {
      throw NumericalError(fmt::format(
          "contraction_check: energy rose by {:.3e} at step {}", e - e_prev, r.step));
    }
    const double speed = std::sqrt(std::max(0.0, r.generator_norm_sq));
    path += 0.5 * (r.time - t_prev) * (speed + speed_prev);
    const double t = r.time - recs.front().time;
    slack = std::min(slack, t * (e0 - e) - path * path);
    e_prev = e;
    t_prev = r.time;
    speed_prev = speed;
  }
  return std::isinf(slack) ? 0.0 : slack;
}

DiagnosticsRecord make_record(std::size_t step, double time, const SymmetricMatrix& l,
                              const FlowSpec& spec, const SpectrumReport& ref,
                              std::span<const Index> traced) {
  DiagnosticsRecord r;
  r.step = step;
  r.time = time;
  r.offdiag_norm = offdiag_norm(l);
  const Vector diag = l.diagonal();
  r.inversions = inversion_count(std::span<const double>(diag.data(), static_cast<std::size_t>(diag.size())));
  r.lyapunov = lyapunov(l, spec);
  r.spectral_drift = spectral_drift(l, ref);

  const Matrix& a = l.matrix();
  const Matrix a2 = a * a;
  r.traces[0] = a2.trace() / 2.0;
  r.traces[1] = a2.cwiseProduct(a).sum() / 3.0;
  r.traces[2] = a2.squaredNorm() / 4.0;

  r.traced_diagonals.reserve(traced.size());
  for (const Index i : traced) {
    if (i < 0 || i >= l.n()) {
      throw DomainError(fmt::format("make_record: traced index {} out of range for n = {}", i, l.n()));
    }
    r.traced_diagonals.push_back(diag(i));
  }

  if (spec.kind == FlowKind::kQrIteration) {
    r.generator_norm_sq = std::numeric_limits<double>::quiet_NaN();
  } else {
    r.generator_norm_sq = inertia_norm_sq(generator(l, spec), spec);
  }
  return r;
}

}  // namespace isoflow
