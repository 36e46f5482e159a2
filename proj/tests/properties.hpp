#pragma once

// Randomized property checks shared by the unit tests and the acceptance
// binary. Each returns the number of violating cases.

#include <cmath>

#include "rankone/factored.hpp"
#include "rankone/frames.hpp"
#include "rankone/lifted.hpp"
#include "rankone/linalg.hpp"
#include "rankone/oracle.hpp"
#include "rankone/random.hpp"

namespace rankone::props {

// z_update is the row-wise minimizer: no point of a ball around it does better.
inline int z_update_certificates(int cases, Seed seed) {
  Rng rng(seed);
  int bad = 0;
  for (int c = 0; c < cases; ++c) {
    const Index r = 1 + static_cast<Index>(rng.below(3));
    const RealMatrix u = rng.normal_matrix<double>(1, r);
    RealVector b(1);
    b(0) = 2.0 * rng.uniform();
    const double beta = std::pow(10.0, -3.0 + 4.0 * rng.uniform());
    const RealVector z = z_update<double>(u, b, beta).row(0).transpose();
    const RealVector urow = u.row(0).transpose();
    auto f = [&](const RealVector& v) { return z_row_objective<double>(v, urow, b(0), beta); };
    if (!grid_argmin_certificate(f, z, 0.5 * (1.0 + z.norm()), 64, derive_seed(seed, static_cast<std::uint64_t>(c))))
      ++bad;
  }
  return bad;
}

// psd_sigma_boost: nearby PSD matrices never score lower.
inline int sigma_boost_certificates(int cases, Seed seed) {
  Rng rng(seed);
  int bad = 0;
  for (int c = 0; c < cases; ++c) {
    const Index n = 2 + static_cast<Index>(rng.below(3));
    const RealMatrix g = rng.normal_matrix<double>(n, n);
    const RealMatrix m = hermitian_part<double>(g);
    const double beta = std::pow(10.0, -1.0 + 2.0 * rng.uniform());
    const RealMatrix x = psd_sigma_boost<double>(m, beta);
    const double f0 = sigma_boost_objective<double>(x, m, beta);
    for (int s = 0; s < 32; ++s) {
      const RealMatrix h = hermitian_part<double>(RealMatrix(rng.normal_matrix<double>(n, n)));
      const double step = 0.3 * rng.uniform();
      const RealMatrix y = project_psd<double>(RealMatrix(x + step * h / h.norm()));
      if (sigma_boost_objective<double>(y, m, beta) < f0 - 1e-10 * (1.0 + std::abs(f0))) {
        ++bad;
        break;
      }
    }
  }
  return bad;
}

// project_affine lands on the constraint set and is idempotent.
inline int projection_idempotence(int cases, Seed seed) {
  Rng rng(seed);
  int bad = 0;
  for (int c = 0; c < cases; ++c) {
    const Index n = 2 + static_cast<Index>(rng.below(4));
    const Index N = n + 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(2 * n)));
    const auto a = gaussian_frame<Complex>(N, n, derive_seed(seed, static_cast<std::uint64_t>(c)));
    const RealVector b_sq = (a.matrix() * rng.normal_vector<Complex>(n)).cwiseAbs2();
    const ComplexMatrix z = hermitian_part<Complex>(ComplexMatrix(rng.normal_matrix<Complex>(n, n)));
    const ComplexMatrix p1 = project_affine(a, z, b_sq);
    const ComplexMatrix p2 = project_affine(a, p1, b_sq);
    const double scale = 1.0 + p1.norm();
    if ((p2 - p1).norm() > 1e-9 * scale || (apply_lift(a, p1) - b_sq).norm() > 1e-9 * (1.0 + b_sq.norm())) ++bad;
  }
  return bad;
}

// <A(X), y> = <X, A^T y> for Hermitian X.
inline int adjoint_identity(int cases, Seed seed) {
  Rng rng(seed);
  int bad = 0;
  for (int c = 0; c < cases; ++c) {
    const Index n = 1 + static_cast<Index>(rng.below(6));
    const Index N = n + static_cast<Index>(rng.below(12));
    const auto a = gaussian_frame<Complex>(N, n, derive_seed(seed, static_cast<std::uint64_t>(c)));
    const ComplexMatrix x = hermitian_part<Complex>(ComplexMatrix(rng.normal_matrix<Complex>(n, n)));
    const RealVector y = rng.normal_vector<double>(N);
    const double lhs = apply_lift(a, x).dot(y);
    const double rhs = (x.adjoint() * apply_lift_adjoint(a, y)).trace().real();
    if (std::abs(lhs - rhs) > 1e-10 * (1.0 + std::abs(lhs))) ++bad;
  }
  return bad;
}

// On a standardized frame every feasible Y has trace sum(b^2).
inline int trace_conservation(int cases, Seed seed) {
  Rng rng(seed);
  int bad = 0;
  for (int c = 0; c < cases; ++c) {
    const Index n = 2 + static_cast<Index>(rng.below(4));
    const Index N = 2 * n + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    const auto a = gaussian_frame<double>(N, n, derive_seed(seed, static_cast<std::uint64_t>(c)));
    const auto q = qr_standardize(a).first;
    const RealVector b_sq = (q.matrix() * rng.normal_vector<double>(n)).cwiseAbs2();
    const RealMatrix z = hermitian_part<double>(RealMatrix(rng.normal_matrix<double>(n, n)));
    const RealMatrix y = project_affine(q, z, b_sq);
    if (std::abs(y.trace() - b_sq.sum()) > 1e-9 * (1.0 + b_sq.sum())) ++bad;
  }
  return bad;
}

// Rank-1 ADM on a standardized frame and the projected iteration produce
// the same z after the same number of steps, with z0 = Q x0.
inline int projected_equivalence(int cases, Seed seed) {
  Rng rng(seed);
  int bad = 0;
  for (int c = 0; c < cases; ++c) {
    const Index n = 2 + static_cast<Index>(rng.below(4));
    const Index N = 2 * n + static_cast<Index>(rng.below(static_cast<std::uint64_t>(2 * n)));
    const auto q = qr_standardize(gaussian_frame<double>(N, n, derive_seed(seed, static_cast<std::uint64_t>(c)))).first;
    const RealVector b = (q.matrix() * rng.normal_vector<double>(n)).cwiseAbs();
    const RealVector x_init = rng.normal_vector<double>(n);
    AdmOptions opt;
    opt.beta = std::pow(10.0, -2.0 + 2.0 * rng.uniform());
    opt.max_iter = 1 + static_cast<int>(rng.below(30));
    // Negative tolerances disable early stops, so both run exactly max_iter steps.
    opt.tol = -1.0;
    opt.stationary_tol = -1.0;
    const auto alg1 = run_rank1_adm(q, b, x_init, opt);
    const auto alg2 = run_projected_adm<double>(range_projector(q), b, RealVector(q.matrix() * x_init), opt);
    if ((alg1.z - alg2.z).norm() > 1e-9 * (1.0 + b.norm())) ++bad;
  }
  return bad;
}

// recovery_error ignores global phase and scale.
inline int phase_invariance(int cases, Seed seed) {
  Rng rng(seed);
  int bad = 0;
  for (int c = 0; c < cases; ++c) {
    const Index n = 1 + static_cast<Index>(rng.below(8));
    const ComplexVector x = rng.normal_vector<Complex>(n);
    const ComplexVector x0 = rng.normal_vector<Complex>(n);
    const Complex phase = std::polar(std::pow(10.0, -2.0 + 4.0 * rng.uniform()), 2.0 * M_PI * rng.uniform());
    const double e1 = recovery_error<Complex>(x, x0);
    const double e2 = recovery_error<Complex>(ComplexVector(phase * x), x0);
    const double e3 = recovery_error<Complex>(x, ComplexVector(std::conj(phase) * x0));
    const double self = recovery_error<Complex>(ComplexVector(phase * x0), x0);
    if (std::abs(e1 - e2) > 1e-10 || std::abs(e1 - e3) > 1e-10 || self > 1e-7) ++bad;
  }
  return bad;
}

// det X_{alpha,t} = alpha^2 t (4 - 2 alpha - t).
inline RealMatrix m3_family(double alpha, double t) {
  RealMatrix x(3, 3);
  x << 1, 1 - alpha, 1 - alpha, 1 - alpha, 1, 1 - alpha * t, 1 - alpha, 1 - alpha * t, 1;
  return x;
}

inline int m3_determinant(int cases, Seed seed) {
  Rng rng(seed);
  int bad = 0;
  for (int c = 0; c < cases; ++c) {
    const double alpha = -3.0 + 6.0 * rng.uniform();
    const double t = -3.0 + 9.0 * rng.uniform();
    const double expect = alpha * alpha * t * (4.0 - 2.0 * alpha - t);
    if (std::abs(m3_family(alpha, t).determinant() - expect) > 1e-10 * (1.0 + std::abs(expect))) ++bad;
  }
  return bad;
}

// (2 - a1^2) ||A_I x0||^2 >= (1 - a1^2) ||A_I x1||^2 on Gaussian instances.
inline int closeness_inequality(int cases, Seed seed) {
  Rng rng(seed);
  int bad = 0;
  for (int c = 0; c < cases; ++c) {
    const Index n = 2 + static_cast<Index>(rng.below(9));
    const Index N = 4 * n + static_cast<Index>(rng.below(static_cast<std::uint64_t>(4 * n)));
    const auto a = gaussian_frame<double>(N, n, derive_seed(seed, static_cast<std::uint64_t>(c)));
    const RealVector x0 = rng.unit_vector<double>(n);
    const RealVector b = (a.matrix() * x0).cwiseAbs();
    const auto si = spectral_init(a, b);
    const auto terms = closeness_terms(take_rows(si.a_normalized, si.partition.small), x0, si.x_min);
    if (terms.lhs < terms.rhs - 1e-10 * (1.0 + std::abs(terms.lhs))) ++bad;
  }
  return bad;
}

}  // namespace rankone::props
