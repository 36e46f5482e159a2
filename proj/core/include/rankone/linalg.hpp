#pragma once

// Small dense linear-algebra helpers shared by the solvers.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rankone/types.hpp"

namespace rankone {

template <typename Scalar>
Mat<Scalar> hermitian_part(const Mat<Scalar>& m) {
  return (m + m.adjoint()) / 2.0;
}

template <typename Scalar>
double max_skew(const Mat<Scalar>& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Rotate (complex) or flip (real) `v` so its first entry with
/// |v_i| > tol is real and positive.
template <typename Scalar>
void normalize_phase(Vec<Scalar>& v, double tol = 1e-12) {
  const double scale = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > tol * scale) {
      const Scalar phase = v(i) / mag;
      v /= phase;
      if constexpr (kIsComplex<Scalar>) v(i) = Scalar(v(i).real(), 0.0);
      return;
    }
  }
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted in
/// decreasing order. Ties keep the solver's original (ascending) index order,
/// and every eigenvector is phase-normalized.
template <typename Scalar>
struct DescendingEigen {
  RealVector values;
  Mat<Scalar> vectors;

  explicit DescendingEigen(const Mat<Scalar>& hermitian) {
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(hermitian);
    const Index n = hermitian.rows();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    const RealVector& w = es.eigenvalues();
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return w(a) > w(b); });
    values.resize(n);
    vectors.resize(n, n);
    for (Index k = 0; k < n; ++k) {
      values(k) = w(order[static_cast<std::size_t>(k)]);
      Vec<Scalar> col = es.eigenvectors().col(order[static_cast<std::size_t>(k)]);
      normalize_phase(col);
      vectors.col(k) = col;
    }
  }
};

/// Largest eigenvalue and its phase-normalized unit eigenvector.
template <typename Scalar>
std::pair<double, Vec<Scalar>> leading_eigenpair(const Mat<Scalar>& hermitian) {
  DescendingEigen<Scalar> eig(hermitian_part(hermitian));
  return {eig.values(0), eig.vectors.col(0)};
}

/// Projection onto the PSD cone (eigenvalue clamp).
template <typename Scalar>
Mat<Scalar> project_psd(const Mat<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(hermitian_part(m));
  const RealVector clamped = es.eigenvalues().cwiseMax(0.0);
  Mat<Scalar> out = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().adjoint();
  return hermitian_part(out);
}

template <typename Scalar>
Mat<Scalar> outer(const Vec<Scalar>& x) {
  return x * x.adjoint();
}

/// Smallest singular value over largest; 0 for an empty or zero matrix.
template <typename Scalar>
double inverse_condition(const Mat<Scalar>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat<Scalar>> svd(m);
  const RealVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

template <typename Scalar>
Index numerical_rank(const Mat<Scalar>& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat<Scalar>> svd(m);
  const RealVector& s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  return (s.array() > rel_tol * s(0)).count();
}

/// Orthonormal basis (columns) of the null space of `m`, with singular
/// values below `rel_tol * sigma_max` treated as zero.
template <typename Scalar>
Mat<Scalar> null_space(const Mat<Scalar>& m, double rel_tol) {
  const Index cols = m.cols();
  if (m.rows() == 0) return Mat<Scalar>::Identity(cols, cols);
  Eigen::JacobiSVD<Mat<Scalar>> svd(m, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double cut = s.size() ? rel_tol * s(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut && s(i) > 0.0) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

/// Thin SVD of a tall n x r matrix (r small) with singular values in
/// decreasing order.
template <typename Scalar>
struct ThinSvd {
  Mat<Scalar> u;
  RealVector s;
  Mat<Scalar> v;

  explicit ThinSvd(const Mat<Scalar>& m) {
    Eigen::JacobiSVD<Mat<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = svd.matrixU();
    s = svd.singularValues();
    v = svd.matrixV();
    // Deterministic column phases: first significant entry of each u column
    // real and positive, compensated in v.
    for (Index k = 0; k < u.cols(); ++k) {
      Vec<Scalar> col = u.col(k);
      const Index idx = [&] {
        const double scale = col.cwiseAbs().maxCoeff();
        for (Index i = 0; i < col.size(); ++i)
          if (std::abs(col(i)) > 1e-12 * scale) return i;
        return Index{0};
      }();
      const double mag = std::abs(col(idx));
      if (mag == 0.0) continue;
      const Scalar phase = col(idx) / mag;
      u.col(k) /= phase;
      v.col(k) /= Eigen::numext::conj(phase);
    }
  }
};

}  // namespace rankone
