#include "rankone/frames.hpp"

#include <cmath>
#include <set>

#include "rankone/error.hpp"
#include "rankone/linalg.hpp"

namespace rankone {

template <typename Scalar>
Frame<Scalar>::Frame(Mat<Scalar> entries, std::string id)
    : a_(std::move(entries)), id_(std::move(id)) {
  require(a_.rows() >= 1 && a_.cols() >= 1, "frame: empty matrix");
  require(a_.allFinite(), "frame: non-finite entry");
}

template <typename Scalar>
Frame<Scalar> Frame<Scalar>::standardized(Mat<Scalar> q, std::string id) {
  Frame f(std::move(q), std::move(id));
  const double defect = f.orthonormality_defect();
  require(defect <= 1e-10, "frame: columns not orthonormal (defect " +
                               std::to_string(defect) + ")");
  f.standardized_ = true;
  return f;
}

template <typename Scalar>
double Frame<Scalar>::orthonormality_defect() const {
  const Index n = a_.cols();
  return (a_.adjoint() * a_ - Mat<Scalar>::Identity(n, n)).cwiseAbs().maxCoeff();
}

template <typename Scalar>
Frame<Scalar> gaussian_frame(Index N, Index n, Seed seed) {
  require(n >= 1 && N >= n, "gaussian_frame: need N >= n >= 1");
  Rng rng(seed);
  return Frame<Scalar>(rng.normal_matrix<Scalar>(N, n), "gaussian");
}

Frame<double> bernoulli_frame(Index N, Index n, Seed seed) {
  require(n >= 1 && N >= 1, "bernoulli_frame: need N, n >= 1");
  require(n < 63 && static_cast<std::uint64_t>(N) <= (std::uint64_t{1} << n),
          "bernoulli_frame: N exceeds 2^n distinct sign rows");
  Rng rng(seed);
  const std::uint64_t total = std::uint64_t{1} << n;
  std::set<std::uint64_t> seen;
  RealMatrix a(N, n);
  Index row = 0;
  while (row < N) {
    const std::uint64_t code = rng.below(total);
    if (!seen.insert(code).second) continue;
    for (Index j = 0; j < n; ++j) a(row, j) = ((code >> j) & 1U) ? -1.0 : 1.0;
    ++row;
  }
  return Frame<double>(std::move(a), "bernoulli");
}

const char* to_string(SpecialKind kind) {
  switch (kind) {
    case SpecialKind::kSignMatched: return "sign-matched";
    case SpecialKind::kOrthogonalComplement: return "orthogonal-complement";
    case SpecialKind::kChain: return "chain";
    case SpecialKind::kChainComplex: return "chain-complex";
  }
  return "?";
}

SpecialKind special_kind_from_string(const std::string& name) {
  for (auto k : {SpecialKind::kSignMatched, SpecialKind::kOrthogonalComplement,
                 SpecialKind::kChain, SpecialKind::kChainComplex})
    if (name == to_string(k)) return k;
  fail(ErrorCode::kInvalidArgument, "unknown special frame kind '" + name + "'");
}

namespace {

// Nonzero coefficient bounded away from 0: magnitude in [0.5, 2], random sign.
double chain_coefficient(Rng& rng) {
  const double mag = 0.5 + 1.5 * rng.uniform();
  return rng.uniform() < 0.5 ? -mag : mag;
}

}  // namespace

template <typename Scalar>
Frame<Scalar> special_frame(SpecialKind kind, Index n, const Vec<Scalar>& x0, Seed seed) {
  require(n >= 1 && x0.size() == n, "special_frame: x0 must have length n");
  Rng rng(seed);
  const bool nonzero = (x0.array().abs() > 0.0).all();
  switch (kind) {
    case SpecialKind::kSignMatched: {
      if constexpr (kIsComplex<Scalar>) {
        fail(ErrorCode::kInvalidArgument, "special_frame: sign-matched needs a real x0");
      } else {
        require(nonzero, "special_frame: sign-matched needs nonzero x0 entries");
        RealMatrix a = RealMatrix::Zero(n + 1, n);
        a.topRows(n).setIdentity();
        for (Index j = 0; j < n; ++j)
          a(n, j) = (x0(j) > 0 ? 1.0 : -1.0) * (0.5 + rng.uniform());
        return Frame<Scalar>(std::move(a), "sign-matched");
      }
    }
    case SpecialKind::kOrthogonalComplement: {
      require(x0.norm() > 0, "special_frame: orthogonal-complement needs x0 != 0");
      const Vec<Scalar> u = x0 / x0.norm();
      Mat<Scalar> a(n + 2, n);
      for (Index i = 0; i < n - 1; ++i) {
        Vec<Scalar> g = rng.normal_vector<Scalar>(n);
        g -= u * (u.adjoint() * g)(0);
        // Rows act as conjugated sensing vectors: (A x)_i = row_i . x.
        a.row(i) = g.adjoint();
      }
      a.row(n - 1) = rng.normal_vector<Scalar>(n).adjoint();
      for (Index i = n; i < n + 2; ++i) a.row(i) = rng.normal_vector<Scalar>(n).adjoint();
      return Frame<Scalar>(std::move(a), "orthogonal-complement");
    }
    case SpecialKind::kChain: {
      require(nonzero, "special_frame: chain needs nonzero x0 entries");
      Mat<Scalar> a = Mat<Scalar>::Zero(2 * n - 1, n);
      a.topRows(n).setIdentity();
      for (Index i = 0; i + 1 < n; ++i) {
        a(n + i, i) = Scalar(1.0);
        a(n + i, i + 1) = Scalar(chain_coefficient(rng));
      }
      return Frame<Scalar>(std::move(a), "chain");
    }
    case SpecialKind::kChainComplex: {
      if constexpr (!kIsComplex<Scalar>) {
        fail(ErrorCode::kInvalidArgument, "special_frame: chain-complex needs the complex field");
      } else {
        require(nonzero, "special_frame: chain-complex needs nonzero x0 entries");
        ComplexMatrix a = ComplexMatrix::Zero(n + 2 * (n - 1), n);
        a.topRows(n).setIdentity();
        for (Index i = 0; i + 1 < n; ++i) {
          const double beta = chain_coefficient(rng);
          // gamma differs from beta in phase by an angle in [pi/4, 3pi/4].
          const double angle = M_PI / 4 + rng.uniform() * M_PI / 2;
          const Complex gamma = beta * std::polar(0.5 + rng.uniform(), angle);
          a(n + i, i) = 1.0;
          a(n + i, i + 1) = beta;
          a(2 * n - 1 + i, i) = 1.0;
          a(2 * n - 1 + i, i + 1) = gamma;
        }
        return Frame<Scalar>(std::move(a), "chain-complex");
      }
    }
  }
  fail(ErrorCode::kInvalidArgument, "special_frame: bad kind");
}

template <typename Scalar>
MeasurementSet<Scalar> measure(const Frame<Scalar>& a, const Vec<Scalar>& x) {
  require(x.size() == a.cols(), "measure: signal length " + std::to_string(x.size()) +
                                    " != frame columns " + std::to_string(a.cols()));
  MeasurementSet<Scalar> m;
  m.b = (a.matrix() * x).cwiseAbs();
  m.b_sq = m.b.cwiseAbs2();
  m.frame_id = a.id();
  m.ground_truth = x;
  return m;
}

template <typename Scalar>
std::pair<Frame<Scalar>, Mat<Scalar>> qr_standardize(const Frame<Scalar>& a) {
  const Index N = a.rows();
  const Index n = a.cols();
  require(N >= n, "qr_standardize: need N >= n");
  Eigen::JacobiSVD<Mat<Scalar>> svd(a.matrix());
  const RealVector& s = svd.singularValues();
  if (!(s(n - 1) > 1e-12 * s(0)))
    fail(ErrorCode::kRankDeficient, "qr_standardize: frame is rank deficient");
  Eigen::HouseholderQR<Mat<Scalar>> qr(a.matrix());
  Mat<Scalar> q = qr.householderQ() * Mat<Scalar>::Identity(N, n);
  Mat<Scalar> r = qr.matrixQR().topRows(n).template triangularView<Eigen::Upper>();
  // Make diag(R) real nonnegative.
  for (Index k = 0; k < n; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag == 0.0) continue;
    const Scalar phase = r(k, k) / mag;
    r.row(k) /= phase;
    q.col(k) *= phase;
  }
  return {Frame<Scalar>::standardized(std::move(q), a.id().empty() ? "Q" : a.id() + "/Q"),
          std::move(r)};
}

namespace {

// T(D) = (N/n) diag(A (A^T D^-1 A)^-1 A^T).
RealVector d_map(const RealMatrix& a, const RealVector& d) {
  const double N = static_cast<double>(a.rows());
  const double n = static_cast<double>(a.cols());
  const RealMatrix scaled = d.cwiseInverse().asDiagonal() * a;
  const RealMatrix gram = a.transpose() * scaled;
  Eigen::LLT<RealMatrix> llt(gram);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::kSingular, "equal_norm_standardize: A^T D^-1 A is singular");
  const RealMatrix sol = llt.solve(a.transpose());  // n x N
  return (N / n) * (a.array() * sol.transpose().array()).rowwise().sum().matrix();
}

// Scale so that sum_i ||a_i||^2 / D_i = N.
double trace_scale(const RealVector& row_sq, const RealVector& d) {
  return (row_sq.array() / d.array()).sum() / static_cast<double>(row_sq.size());
}

}  // namespace

StandardizationResult equal_norm_standardize(const RealMatrix& a, const StandardizeOptions& opt) {
  const Index N = a.rows();
  const Index n = a.cols();
  require(N > n && n >= 1, "equal_norm_standardize: need N > n >= 1");
  require(opt.tol > 0 && opt.max_iter >= 1, "equal_norm_standardize: bad tol/max_iter");
  const RealVector row_sq = a.rowwise().squaredNorm();
  require((row_sq.array() > 0).all(), "equal_norm_standardize: zero row in frame");

  RealVector d = opt.d0 ? *opt.d0 : RealVector::Ones(N);
  require(d.size() == N && (d.array() > 0).all(), "equal_norm_standardize: D0 must be positive");
  d *= trace_scale(row_sq, d);

  StandardizationResult res;
  if (opt.keep_history) res.history.push_back(d);
  bool converged = false;
  for (int k = 1; k <= opt.max_iter; ++k) {
    RealVector t = d_map(a, d);
    if (opt.keep_history) res.unscaled.push_back(t);
    t *= trace_scale(row_sq, t);
    res.residual = (t.array() / d.array() - 1.0).abs().maxCoeff();
    d = t;
    res.iterations = k;
    if (opt.keep_history) res.history.push_back(d);
    if (res.residual <= opt.tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    fail(ErrorCode::kNoConvergence, "equal_norm_standardize: no convergence in " +
                                        std::to_string(opt.max_iter) + " iterations");
  res.d = d;
  const RealMatrix scaled = d.cwiseSqrt().cwiseInverse().asDiagonal() * a;
  Eigen::HouseholderQR<RealMatrix> qr(scaled);
  res.q = qr.householderQ() * RealMatrix::Identity(N, n);
  res.b = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Index k = 0; k < n; ++k) {
    if (res.b(k, k) < 0) {
      res.b.row(k) *= -1.0;
      res.q.col(k) *= -1.0;
    }
  }
  return res;
}

RealMatrix qr_normalize_standardize(const RealMatrix& a, double tol, int max_iter,
                                    int* iterations) {
  const Index N = a.rows();
  const Index n = a.cols();
  const double target = std::sqrt(static_cast<double>(n) / static_cast<double>(N));
  RealMatrix q = a;
  for (int k = 1; k <= max_iter; ++k) {
    RealVector norms = q.rowwise().norm();
    require((norms.array() > 0).all(), "qr_normalize_standardize: zero row");
    q = (target * norms.cwiseInverse()).asDiagonal() * q;
    Eigen::HouseholderQR<RealMatrix> qr(q);
    q = qr.householderQ() * RealMatrix::Identity(N, n);
    if (iterations) *iterations = k;
    if (equal_norm_defect(q) <= tol) return q;
  }
  fail(ErrorCode::kNoConvergence, "qr_normalize_standardize: no convergence");
}

template <typename Scalar>
bool check_rank_star(const Frame<Scalar>& a) {
  const Index N = a.rows();
  const Index n = a.cols();
  if (N <= n) return false;
  double combos = 1.0;
  for (Index k = 0; k < n; ++k) combos = combos * static_cast<double>(N - k) / static_cast<double>(k + 1);
  if (combos > 1e6) fail(ErrorCode::kBudgetExceeded, "check_rank_star: C(N,n) above 1e6");
  const double scale = Eigen::JacobiSVD<Mat<Scalar>>(a.matrix()).singularValues()(0);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) idx[static_cast<std::size_t>(k)] = k;
  Mat<Scalar> sub(n, n);
  while (true) {
    for (Index k = 0; k < n; ++k) sub.row(k) = a.matrix().row(idx[static_cast<std::size_t>(k)]);
    const RealVector s = Eigen::JacobiSVD<Mat<Scalar>>(sub).singularValues();
    if (!(s(n - 1) > 1e-10 * scale)) return false;
    // Next combination in lexicographic order.
    Index k = n - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == N - n + k) --k;
    if (k < 0) return true;
    ++idx[static_cast<std::size_t>(k)];
    for (Index j = k + 1; j < n; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

template <typename Scalar>
double equal_norm_defect(const Mat<Scalar>& q) {
  const double target = static_cast<double>(q.cols()) / static_cast<double>(q.rows());
  return (q.rowwise().squaredNorm().array() - target).abs().maxCoeff();
}

#define RANKONE_INSTANTIATE(S)                                                              \
  template class Frame<S>;                                                                  \
  template Frame<S> gaussian_frame<S>(Index, Index, Seed);                                  \
  template Frame<S> special_frame<S>(SpecialKind, Index, const Vec<S>&, Seed);              \
  template MeasurementSet<S> measure<S>(const Frame<S>&, const Vec<S>&);                    \
  template std::pair<Frame<S>, Mat<S>> qr_standardize<S>(const Frame<S>&);                  \
  template bool check_rank_star<S>(const Frame<S>&);                                        \
  template double equal_norm_defect<S>(const Mat<S>&);

RANKONE_INSTANTIATE(double)
RANKONE_INSTANTIATE(Complex)
#undef RANKONE_INSTANTIATE

}  // namespace rankone
