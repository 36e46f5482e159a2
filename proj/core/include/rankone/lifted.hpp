#pragma once

// Matrix-space recovery over the lifted operator A(X)_i = a_i X a_i^H.

#include <string>
#include <vector>

#include "rankone/frames.hpp"

namespace rankone {

/// diag(A X A^H) for Hermitian X.
template <typename Scalar>
RealVector apply_lift(const Frame<Scalar>& a, const Mat<Scalar>& x);

/// A^H diag(y) A.
template <typename Scalar>
Mat<Scalar> apply_lift_adjoint(const Frame<Scalar>& a, const RealVector& y);

enum class GramMethod { kCholesky, kJitteredCholesky, kPseudoInverse };

const char* to_string(GramMethod m);

/// Factorization of G = A A^T (G_ij = |a_i . a_j|^2), computed once per frame.
template <typename Scalar>
class GramFactor {
 public:
  explicit GramFactor(const Frame<Scalar>& a, bool allow_pseudo_inverse = true);

  RealVector solve(const RealVector& rhs) const;
  GramMethod method() const { return method_; }
  Index rank() const { return rank_; }

 private:
  GramMethod method_ = GramMethod::kCholesky;
  Eigen::LLT<RealMatrix> llt_;
  RealMatrix pinv_;
  Index rank_ = 0;
};

/// Orthogonal projection of Z onto {Y : A(Y) = b_sq}.
template <typename Scalar>
Mat<Scalar> project_affine(const Frame<Scalar>& a, const Mat<Scalar>& z, const RealVector& b_sq,
                           const GramFactor<Scalar>* gram = nullptr);

/// argmin_{X >= 0} -sigma_1(X) + beta/2 ||X - M||_F^2:
/// keep the eigenvectors, clamp the spectrum at zero and lift the top
/// eigenvalue to max(m_1 + 1/beta, 0).
template <typename Scalar>
Mat<Scalar> psd_sigma_boost(const Mat<Scalar>& m, double beta);

template <typename Scalar>
double sigma_boost_objective(const Mat<Scalar>& x, const Mat<Scalar>& m, double beta);

template <typename Scalar>
struct LiftedReport {
  Mat<Scalar> x_final;
  double sigma1 = 0.0;
  Vec<Scalar> v1;
  std::vector<double> residual_trace;     // ||X - Y||_F (ADM) or ||X_k+1 - X_k||_F (POCS)
  std::vector<double> feasibility_trace;  // ||A(X) - b^2||, when traced
  std::vector<double> sigma_trace;        // sigma_1(X), when traced
  double feasibility = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> warnings;
};

struct LiftedOptions {
  double beta = 1.0;
  int max_iter = 5000;
  double tol = 1e-10;
  bool full_trace = false;  // also record feasibility and sigma_1 per iteration
};

/// Leading-eigenvalue ADM. Stops once the primal gap ||X - Y|| and the
/// change in Y both fall below tol (1 + ||Y||).
template <typename Scalar>
LiftedReport<Scalar> lifted_adm(const Frame<Scalar>& a, const RealVector& b_sq,
                                const Mat<Scalar>& x0, const LiftedOptions& opt = {},
                                const GramFactor<Scalar>* gram = nullptr);

/// project_affine(eps I) with eps = sum(b^2)/n.
template <typename Scalar>
Mat<Scalar> default_lifted_init(const Frame<Scalar>& a, const RealVector& b_sq,
                                const GramFactor<Scalar>* gram = nullptr);

/// Alternating projections between the PSD cone and the affine set.
template <typename Scalar>
LiftedReport<Scalar> feasibility_pocs(const Frame<Scalar>& a, const RealVector& b_sq,
                                      const Mat<Scalar>& x0, int max_iter = 5000, double tol = 1e-10,
                                      const GramFactor<Scalar>* gram = nullptr);

/// |v_1^H x0|^2 >= sigma_1(X).
template <typename Scalar>
bool basin_check(const Mat<Scalar>& x, const Vec<Scalar>& x0);

/// ||X - x0 x0^H||_F / ||x0||^2.
template <typename Scalar>
double lifted_error(const Mat<Scalar>& x, const Vec<Scalar>& x0);

/// CSV: iter, gap, feasibility, sigma1 (blank when not traced).
template <typename Scalar>
std::string lifted_trace_csv(const LiftedReport<Scalar>& r);

}  // namespace rankone
