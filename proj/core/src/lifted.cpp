#include "rankone/lifted.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "rankone/error.hpp"
#include "rankone/linalg.hpp"

namespace rankone {

template <typename Scalar>
RealVector apply_lift(const Frame<Scalar>& a, const Mat<Scalar>& x) {
  require(x.rows() == a.cols() && x.cols() == a.cols(), "apply_lift: X must be n x n");
  require(max_skew(x) <= 1e-10 * std::max(1.0, x.cwiseAbs().maxCoeff()),
          "apply_lift: X is not Hermitian");
  const Mat<Scalar> ax = a.matrix() * x;
  return (ax.array() * a.matrix().conjugate().array()).rowwise().sum().real();
}

template <typename Scalar>
Mat<Scalar> apply_lift_adjoint(const Frame<Scalar>& a, const RealVector& y) {
  require(y.size() == a.rows(), "apply_lift_adjoint: y must have length N");
  Mat<Scalar> out = a.matrix().adjoint() * (y.asDiagonal() * a.matrix());
  return hermitian_part(out);
}

const char* to_string(GramMethod m) {
  switch (m) {
    case GramMethod::kCholesky: return "cholesky";
    case GramMethod::kJitteredCholesky: return "jittered-cholesky";
    case GramMethod::kPseudoInverse: return "pseudo-inverse";
  }
  return "?";
}

template <typename Scalar>
GramFactor<Scalar>::GramFactor(const Frame<Scalar>& a, bool allow_pseudo_inverse) {
  const RealMatrix g = (a.matrix() * a.matrix().adjoint()).cwiseAbs2();
  const Index N = g.rows();
  // LLT does not always report failure on a semidefinite matrix, so also
  // reject a factor whose condition estimate is at rounding level.
  auto usable = [](const Eigen::LLT<RealMatrix>& f) {
    return f.info() == Eigen::Success && f.rcond() > 1e-14;
  };
  llt_.compute(g);
  rank_ = N;
  if (usable(llt_)) return;
  // Jitter only rescues an ill-conditioned full-rank G; a rank-deficient G
  // (dependent lifted rows) needs the pseudo-inverse to stay exact.
  const Index rank = numerical_rank(g, 1e-10);
  if (rank == N) {
    const double jitter = 1e-12 * g.trace() / static_cast<double>(N);
    llt_.compute(g + jitter * RealMatrix::Identity(N, N));
    method_ = GramMethod::kJitteredCholesky;
    if (usable(llt_)) return;
  }
  if (!allow_pseudo_inverse)
    fail(ErrorCode::kSingular, "project_affine: Gram matrix is numerically singular");
  method_ = GramMethod::kPseudoInverse;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(g);
  const RealVector& w = es.eigenvalues();
  const double cut = 1e-10 * w.cwiseAbs().maxCoeff();
  RealVector inv = RealVector::Zero(N);
  rank_ = 0;
  for (Index i = 0; i < N; ++i) {
    if (w(i) > cut) {
      inv(i) = 1.0 / w(i);
      ++rank_;
    }
  }
  pinv_ = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

template <typename Scalar>
RealVector GramFactor<Scalar>::solve(const RealVector& rhs) const {
  if (method_ == GramMethod::kPseudoInverse) return pinv_ * rhs;
  return llt_.solve(rhs);
}

template <typename Scalar>
Mat<Scalar> project_affine(const Frame<Scalar>& a, const Mat<Scalar>& z, const RealVector& b_sq,
                           const GramFactor<Scalar>* gram) {
  require(b_sq.size() == a.rows(), "project_affine: b_sq must have length N");
  std::optional<GramFactor<Scalar>> local;
  if (!gram) gram = &local.emplace(a);
  const Mat<Scalar> zh = hermitian_part(z);
  const RealVector r = b_sq - apply_lift(a, zh);
  return hermitian_part(Mat<Scalar>(zh + apply_lift_adjoint(a, gram->solve(r))));
}

template <typename Scalar>
Mat<Scalar> psd_sigma_boost(const Mat<Scalar>& m, double beta) {
  require(beta > 0, "psd_sigma_boost: beta must be positive");
  require(m.allFinite(), "psd_sigma_boost: non-finite input");
  DescendingEigen<Scalar> eig(hermitian_part(m));
  // Exact minimizer: the top eigenvalue moves to max(m_1 + 1/beta, 0), the
  // rest clamp at zero. Equals max(m, 0) + e_1/beta whenever m_1 >= 0.
  RealVector d = eig.values.cwiseMax(0.0);
  d(0) = std::max(eig.values(0) + 1.0 / beta, 0.0);
  return hermitian_part(Mat<Scalar>(eig.vectors * d.asDiagonal() * eig.vectors.adjoint()));
}

template <typename Scalar>
double sigma_boost_objective(const Mat<Scalar>& x, const Mat<Scalar>& m, double beta) {
  const double s1 = Eigen::SelfAdjointEigenSolver<Mat<Scalar>>(hermitian_part(x), Eigen::EigenvaluesOnly)
                        .eigenvalues()
                        .maxCoeff();
  return -s1 + 0.5 * beta * (x - m).squaredNorm();
}

namespace {

template <typename Scalar>
void finish_report(LiftedReport<Scalar>& rep, const Frame<Scalar>& a, const RealVector& b_sq) {
  auto [s1, v1] = leading_eigenpair(rep.x_final);
  rep.sigma1 = s1;
  rep.v1 = v1;
  rep.feasibility = (apply_lift(a, rep.x_final) - b_sq).norm();
}

}  // namespace

template <typename Scalar>
LiftedReport<Scalar> lifted_adm(const Frame<Scalar>& a, const RealVector& b_sq, const Mat<Scalar>& x0,
                                const LiftedOptions& opt, const GramFactor<Scalar>* gram) {
  require(opt.beta > 0, "lifted_adm: beta must be positive");
  require(opt.max_iter >= 1, "lifted_adm: max_iter must be >= 1");
  require(x0.rows() == a.cols() && x0.cols() == a.cols(), "lifted_adm: X0 must be n x n");
  std::optional<GramFactor<Scalar>> local;
  if (!gram) gram = &local.emplace(a);

  LiftedReport<Scalar> rep;
  if (!a.is_standardized() && a.orthonormality_defect() > 1e-10)
    rep.warnings.emplace_back("frame is not standardized; trace is not conserved on the feasible set");

  const Index n = a.cols();
  Mat<Scalar> y = project_affine(a, x0, b_sq, gram);
  Mat<Scalar> lambda = Mat<Scalar>::Zero(n, n);
  Mat<Scalar> x = x0;
  const double inv_beta = 1.0 / opt.beta;
  for (int k = 1; k <= opt.max_iter; ++k) {
    x = psd_sigma_boost(Mat<Scalar>(y + inv_beta * lambda), opt.beta);
    Mat<Scalar> y_next = project_affine(a, Mat<Scalar>(x - inv_beta * lambda), b_sq, gram);
    lambda = hermitian_part(Mat<Scalar>(lambda - opt.beta * (x - y_next)));
    const double gap = (x - y_next).norm();
    const double change = (y_next - y).norm();
    y = std::move(y_next);
    rep.residual_trace.push_back(gap);
    if (opt.full_trace) {
      rep.feasibility_trace.push_back((apply_lift(a, x) - b_sq).norm());
      rep.sigma_trace.push_back(leading_eigenpair(x).first);
    }
    rep.iterations = k;
    const double scale = opt.tol * (1.0 + y.norm());
    if (gap <= scale && change <= scale) {
      rep.converged = true;
      break;
    }
  }
  rep.x_final = x;
  finish_report(rep, a, b_sq);
  return rep;
}

template <typename Scalar>
Mat<Scalar> default_lifted_init(const Frame<Scalar>& a, const RealVector& b_sq,
                                const GramFactor<Scalar>* gram) {
  const Index n = a.cols();
  const double eps = b_sq.sum() / static_cast<double>(n);
  return project_affine(a, Mat<Scalar>(eps * Mat<Scalar>::Identity(n, n)), b_sq, gram);
}

template <typename Scalar>
LiftedReport<Scalar> feasibility_pocs(const Frame<Scalar>& a, const RealVector& b_sq, const Mat<Scalar>& x0,
                                      int max_iter, double tol, const GramFactor<Scalar>* gram) {
  require(max_iter >= 1, "feasibility_pocs: max_iter must be >= 1");
  std::optional<GramFactor<Scalar>> local;
  if (!gram) gram = &local.emplace(a);
  LiftedReport<Scalar> rep;
  Mat<Scalar> x = hermitian_part(x0);
  for (int k = 1; k <= max_iter; ++k) {
    Mat<Scalar> next = project_psd(project_affine(a, x, b_sq, gram));
    const double step = (next - x).norm();
    x = std::move(next);
    rep.residual_trace.push_back(step);
    rep.iterations = k;
    if (step <= tol) {
      rep.converged = true;
      break;
    }
  }
  rep.x_final = x;
  finish_report(rep, a, b_sq);
  return rep;
}

template <typename Scalar>
bool basin_check(const Mat<Scalar>& x, const Vec<Scalar>& x0) {
  require(x0.size() == x.rows(), "basin_check: dimension mismatch");
  auto [s1, v1] = leading_eigenpair(x);
  const double overlap = std::norm(v1.dot(x0));
  return overlap >= s1;
}

template <typename Scalar>
double lifted_error(const Mat<Scalar>& x, const Vec<Scalar>& x0) {
  require(x0.norm() > 0, "lifted_error: zero ground truth");
  return (x - outer(x0)).norm() / x0.squaredNorm();
}

template <typename Scalar>
std::string lifted_trace_csv(const LiftedReport<Scalar>& r) {
  std::ostringstream os;
  os.precision(17);
  os << "iter,gap,feasibility,sigma1\n";
  for (std::size_t k = 0; k < r.residual_trace.size(); ++k) {
    os << k + 1 << ',' << r.residual_trace[k] << ',';
    if (k < r.feasibility_trace.size()) os << r.feasibility_trace[k];
    os << ',';
    if (k < r.sigma_trace.size()) os << r.sigma_trace[k];
    os << '\n';
  }
  return os.str();
}

#define RANKONE_INSTANTIATE(S)                                                                       \
  template RealVector apply_lift<S>(const Frame<S>&, const Mat<S>&);                                 \
  template Mat<S> apply_lift_adjoint<S>(const Frame<S>&, const RealVector&);                         \
  template class GramFactor<S>;                                                                      \
  template Mat<S> project_affine<S>(const Frame<S>&, const Mat<S>&, const RealVector&,               \
                                    const GramFactor<S>*);                                           \
  template Mat<S> psd_sigma_boost<S>(const Mat<S>&, double);                                         \
  template double sigma_boost_objective<S>(const Mat<S>&, const Mat<S>&, double);                    \
  template LiftedReport<S> lifted_adm<S>(const Frame<S>&, const RealVector&, const Mat<S>&,          \
                                         const LiftedOptions&, const GramFactor<S>*);                \
  template Mat<S> default_lifted_init<S>(const Frame<S>&, const RealVector&, const GramFactor<S>*);  \
  template LiftedReport<S> feasibility_pocs<S>(const Frame<S>&, const RealVector&, const Mat<S>&,    \
                                               int, double, const GramFactor<S>*);                   \
  template bool basin_check<S>(const Mat<S>&, const Vec<S>&);                                        \
  template double lifted_error<S>(const Mat<S>&, const Vec<S>&);                                     \
  template std::string lifted_trace_csv<S>(const LiftedReport<S>&);

RANKONE_INSTANTIATE(double)
RANKONE_INSTANTIATE(Complex)
#undef RANKONE_INSTANTIATE

}  // namespace rankone
