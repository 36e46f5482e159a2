#include "rankone/factored.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankone/error.hpp"
#include "rankone/linalg.hpp"

namespace rankone {

template <typename Scalar>
Mat<Scalar> z_update(const Mat<Scalar>& u, const RealVector& b, double beta, const Mat<Scalar>* prev) {
  require(beta > 0, "z_update: beta must be positive");
  require(b.size() == u.rows(), "z_update: b must have one entry per row of u");
  require(u.allFinite() && b.allFinite(), "z_update: non-finite input");
  Mat<Scalar> z(u.rows(), u.cols());
  const double inv = 1.0 / (1.0 + beta);
  for (Index i = 0; i < u.rows(); ++i) {
    const double nu = u.row(i).norm();
    if (nu > 0.0) {
      z.row(i) = u.row(i) * ((b(i) + beta * nu) * inv / nu);
      continue;
    }
    double np = 0.0;
    if (prev && prev->rows() == u.rows() && prev->cols() == u.cols()) np = prev->row(i).norm();
    if (np > 0.0) {
      z.row(i) = prev->row(i) * (b(i) * inv / np);
    } else {
      z.row(i).setZero();
      z(i, 0) = Scalar(b(i) * inv);
    }
  }
  return z;
}

template <typename Scalar>
double z_row_objective(const Vec<Scalar>& z_row, const Vec<Scalar>& u_row, double b, double beta) {
  const double d = z_row.norm() - b;
  return 0.5 * d * d + 0.5 * beta * (u_row - z_row).squaredNorm();
}

const char* to_string(AdmStatus s) {
  switch (s) {
    case AdmStatus::kSolved: return "solved";
    case AdmStatus::kStationary: return "stationary";
    case AdmStatus::kMaxIter: return "max_iter";
  }
  return "?";
}

namespace {

template <typename Scalar>
Mat<Scalar> pseudo_inverse_full_rank(const Mat<Scalar>& a, const char* who) {
  Eigen::ColPivHouseholderQR<Mat<Scalar>> qr(a);
  qr.setThreshold(1e-12);
  if (qr.rank() < a.cols()) fail(ErrorCode::kRankDeficient, std::string(who) + ": frame is rank deficient");
  return qr.solve(Mat<Scalar>::Identity(a.rows(), a.rows()));
}

template <typename Scalar>
double magnitude_residual(const Mat<Scalar>& ax, const RealVector& b) {
  return (ax.rowwise().norm() - b).norm();
}

}  // namespace

template <typename Scalar>
Rank1Result<Scalar> run_rank1_adm(const Frame<Scalar>& a, const RealVector& b, const Vec<Scalar>& x_init,
                                  const AdmOptions& opt) {
  require(b.size() == a.rows(), "run_rank1_adm: b must have length N");
  require(x_init.size() == a.cols(), "run_rank1_adm: initial x must have length n");
  require(opt.beta > 0 && opt.max_iter >= 1, "run_rank1_adm: bad beta/max_iter");
  const Mat<Scalar> pinv = pseudo_inverse_full_rank(a.matrix(), "run_rank1_adm");
  const double bnorm = b.norm();
  const double inv_beta = 1.0 / opt.beta;

  Rank1Result<Scalar> res;
  Vec<Scalar> x = x_init;
  Vec<Scalar> ax = a.matrix() * x;
  Vec<Scalar> lambda = Vec<Scalar>::Zero(a.rows());
  Mat<Scalar> z = ax;
  for (int k = 1; k <= opt.max_iter; ++k) {
    const Mat<Scalar> u = ax + inv_beta * lambda;
    z = z_update(u, b, opt.beta, &z);
    const Vec<Scalar> x_next = pinv * (z.col(0) - inv_beta * lambda);
    ax = a.matrix() * x_next;
    const Vec<Scalar> gap = ax - z.col(0);
    lambda += opt.beta * gap;
    const double step = (x_next - x).norm();
    x = x_next;
    const double resid = magnitude_residual<Scalar>(ax, b);
    res.trace.push_back(resid);
    res.iterations = k;
    if (resid <= opt.tol * bnorm) {
      res.status = AdmStatus::kSolved;
      break;
    }
    if (step <= opt.stationary_tol * x.norm() && gap.norm() <= opt.stationary_tol * bnorm) {
      res.status = AdmStatus::kStationary;
      break;
    }
  }
  res.x = x;
  res.z = z.col(0);
  res.lambda_hat = inv_beta * lambda;
  return res;
}

template <typename Scalar>
Mat<Scalar> range_projector(const Frame<Scalar>& q) {
  require(q.orthonormality_defect() <= 1e-10, "range_projector: frame is not standardized");
  return q.matrix() * q.matrix().adjoint();
}

template <typename Scalar>
ProjectedResult<Scalar> run_projected_adm(const Mat<Scalar>& p, const RealVector& b, const Vec<Scalar>& z0,
                                          const AdmOptions& opt, bool keep_history) {
  const Index N = p.rows();
  require(p.cols() == N && b.size() == N && z0.size() == N, "run_projected_adm: dimension mismatch");
  require(opt.beta > 0 && opt.max_iter >= 1, "run_projected_adm: bad beta/max_iter");
  const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
  require((p * p - p).cwiseAbs().maxCoeff() <= 1e-10 * scale && max_skew(p) <= 1e-10 * scale,
          "run_projected_adm: P is not an orthogonal projector");
  const double bnorm = b.norm();
  ProjectedResult<Scalar> res;
  Mat<Scalar> z = z0;
  Vec<Scalar> lam = Vec<Scalar>::Zero(N);
  Vec<Scalar> pz = p * z0;
  for (int k = 1; k <= opt.max_iter; ++k) {
    const Mat<Scalar> u = pz + lam;
    const Vec<Scalar> z_prev = z.col(0);
    z = z_update(u, b, opt.beta, &z);
    const Vec<Scalar> t = lam - z.col(0);
    lam = t - p * t;
    pz = p * z.col(0);
    if (keep_history) {
      res.z_history.push_back(z.col(0));
      res.lambda_history.push_back(lam);
    }
    const double resid = magnitude_residual<Scalar>(pz, b);
    res.trace.push_back(resid);
    res.iterations = k;
    if (resid <= opt.tol * bnorm) {
      res.status = AdmStatus::kSolved;
      break;
    }
    if ((z.col(0) - z_prev).norm() <= opt.stationary_tol * bnorm &&
        (pz - z.col(0)).norm() <= opt.stationary_tol * bnorm) {
      res.status = AdmStatus::kStationary;
      break;
    }
  }
  res.z = z.col(0);
  res.lambda_hat = lam;
  return res;
}

template <typename Scalar>
Mat<Scalar> sigma_boost_factor(const Mat<Scalar>& w, double g) {
  ThinSvd<Scalar> svd(w);
  RealVector d = svd.s;
  if (d.size() > 0) d(0) += g;
  return svd.u * d.asDiagonal() * svd.v.adjoint();
}

template <typename Scalar>
void normalize_global_phase(Vec<Scalar>& x) {
  const Scalar s = x.sum();
  const double mag = std::abs(s);
  if (mag > 1e-8 * x.cwiseAbs().sum()) {
    x /= (s / mag);
  } else {
    normalize_phase(x);
  }
}

template <typename Scalar>
Vec<Scalar> extract_signal(const LinearMap<Scalar>& q, const Mat<Scalar>& y, const RealVector& b) {
  ThinSvd<Scalar> svd(y);
  Vec<Scalar> x = svd.u.col(0);
  const RealVector mag = q.apply(Mat<Scalar>(x)).col(0).cwiseAbs();
  const double denom = mag.squaredNorm();
  if (denom > 0.0) x *= mag.dot(b) / denom;
  normalize_global_phase(x);
  return x;
}

template <typename Scalar>
RankRResult<Scalar> run_rankr_adm(const LinearMap<Scalar>& q, const RealVector& b, const Mat<Scalar>& y0,
                                  const RankROptions& opt) {
  require(q.standardized, "run_rankr_adm: frame must be standardized (trace invariance)");
  require(opt.r >= 1, "run_rankr_adm: r must be >= 1");
  require(opt.beta > 0 && opt.gamma >= 0 && opt.max_iter >= 1, "run_rankr_adm: bad beta/gamma/max_iter");
  require(b.size() == q.rows, "run_rankr_adm: b must have length N");
  require(y0.rows() == q.cols && y0.cols() >= opt.r, "run_rankr_adm: y0 must be n x r");
  const double bnorm = b.norm();
  const double g = opt.gamma * bnorm;
  const double inv_beta = 1.0 / opt.beta;

  auto y_step = [&](const Mat<Scalar>& target) {
    Mat<Scalar> w = q.adjoint(target);
    if constexpr (kIsComplex<Scalar>) {
      if (opt.real_signal) w = w.real().template cast<Scalar>();
    }
    return sigma_boost_factor(w, g);
  };

  RankRResult<Scalar> res;
  Mat<Scalar> y = y0.leftCols(opt.r);
  if constexpr (kIsComplex<Scalar>) {
    if (opt.real_signal) y = y.real().template cast<Scalar>();
  }
  Mat<Scalar> qy = q.apply(y);
  Mat<Scalar> lambda = Mat<Scalar>::Zero(q.rows, opt.r);
  Mat<Scalar> z = qy;
  for (int k = 1; k <= opt.max_iter; ++k) {
    z = z_update(Mat<Scalar>(qy + inv_beta * lambda), b, opt.beta, &z);
    Mat<Scalar> y_next;
    if (opt.order == UpdateOrder::kMultiplierFirst) {
      lambda += opt.beta * (qy - z);
      y_next = y_step(Mat<Scalar>(z - inv_beta * lambda));
      qy = q.apply(y_next);
    } else {
      y_next = y_step(Mat<Scalar>(z - inv_beta * lambda));
      qy = q.apply(y_next);
      lambda += opt.beta * (qy - z);
    }
    const double step = (y_next - y).norm();
    y = std::move(y_next);
    const double resid = magnitude_residual<Scalar>(qy, b);
    res.residual_trace.push_back(resid);
    if (opt.trace_sigma) res.sigma_trace.push_back(ThinSvd<Scalar>(y).s(0));
    res.iterations = k;
    if (resid <= opt.tol * bnorm) {
      res.status = AdmStatus::kSolved;
      break;
    }
    if (step <= opt.step_tol * y.norm()) {
      res.status = AdmStatus::kStationary;
      break;
    }
  }
  res.y = y;
  res.x = extract_signal(q, y, b);
  return res;
}

template <typename Scalar>
Mat<Scalar> take_rows(const Mat<Scalar>& m, const std::vector<Index>& idx) {
  Mat<Scalar> out(static_cast<Index>(idx.size()), m.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Index>(k)) = m.row(idx[k]);
  return out;
}

RealVector take(const RealVector& v, const std::vector<Index>& idx) {
  RealVector out(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Index>(k)) = v(idx[k]);
  return out;
}

template <typename Scalar>
SpectralInitResult<Scalar> spectral_init(const Frame<Scalar>& a, const RealVector& b, const SpectralInitConfig& cfg) {
  const Index N = a.rows();
  const Index n = a.cols();
  require(b.size() == N, "spectral_init: b must have length N");
  require(cfg.frac_I > 0 && cfg.frac_I < 1, "spectral_init: frac_I must lie in (0,1)");
  require(cfg.frac_II >= 0 && cfg.frac_II <= 1, "spectral_init: frac_II must lie in (0,1]");
  require(b.maxCoeff() > 0, "spectral_init: all-zero measurements");

  SpectralInitResult<Scalar> res;
  const RealVector norms = a.matrix().rowwise().norm();
  require((norms.array() > 0).all(), "spectral_init: zero row in frame");
  res.a_normalized = norms.cwiseInverse().asDiagonal() * a.matrix();
  res.b_normalized = b.cwiseQuotient(norms);

  const Index n_small = std::max<Index>(2, static_cast<Index>(std::llround(cfg.frac_I * static_cast<double>(N))));
  require(n_small < N, "spectral_init: N_I must be < N");
  Index n_large = cfg.frac_II > 0 ? static_cast<Index>(std::ceil(cfg.frac_II * static_cast<double>(N)))
                                  : std::max<Index>(n, static_cast<Index>(std::ceil(0.25 * static_cast<double>(N))));
  n_large = std::min(n_large, N - n_small);
  if (n_small < n) res.warnings.emplace_back("N_I < n: A_I need not have rank n-1");
  if (n_large < n) res.warnings.emplace_back("N_II < n: sign recovery system is underdetermined");

  std::vector<Index> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return res.b_normalized(i) < res.b_normalized(j); });
  auto& part = res.partition;
  part.small.assign(order.begin(), order.begin() + n_small);
  part.large.assign(order.end() - n_large, order.end());
  part.middle.assign(order.begin() + n_small, order.end() - n_large);

  const Mat<Scalar> a_i = take_rows(res.a_normalized, part.small);
  Eigen::JacobiSVD<Mat<Scalar>> svd(a_i, Eigen::ComputeFullV);
  // Singular values are sorted decreasing; the least one is the last column
  // (columns past the row count correspond to zero singular values).
  Vec<Scalar> x = svd.matrixV().col(n - 1);
  normalize_phase(x);
  res.x_min = x / x.norm();
  return res;
}

template <typename Scalar>
Vec<Scalar> sign_recovery(const Mat<Scalar>& a_ii, const RealVector& b_ii, const Vec<Scalar>& x_est,
                          int* undefined_signs) {
  require(a_ii.rows() == b_ii.size() && a_ii.cols() == x_est.size(), "sign_recovery: dimension mismatch");
  const Vec<Scalar> ax = a_ii * x_est;
  const double scale = ax.cwiseAbs().maxCoeff();
  Vec<Scalar> rhs(ax.size());
  int undefined = 0;
  for (Index i = 0; i < ax.size(); ++i) {
    const double mag = std::abs(ax(i));
    if (mag <= 1e-14 * scale || mag == 0.0) {
      rhs(i) = Scalar(b_ii(i));
      ++undefined;
    } else {
      rhs(i) = ax(i) / mag * b_ii(i);
    }
  }
  if (undefined_signs) *undefined_signs = undefined;
  Eigen::ColPivHouseholderQR<Mat<Scalar>> qr(a_ii);
  qr.setThreshold(1e-12);
  if (qr.rank() < a_ii.cols()) fail(ErrorCode::kRankDeficient, "sign_recovery: A_II is rank deficient");
  return qr.solve(rhs);
}

template <typename Scalar>
double recovery_error(const Vec<Scalar>& x, const Vec<Scalar>& x0) {
  require(x.size() == x0.size(), "recovery_error: dimension mismatch");
  const double nx = x.norm();
  const double n0 = x0.norm();
  require(nx > 0 && n0 > 0, "recovery_error: zero vector");
  // Norm of the part of x/|x| orthogonal to x0: sin of the angle, without
  // the cancellation in sqrt(1 - cos^2).
  const Vec<Scalar> u = x / nx;
  const Vec<Scalar> u0 = x0 / n0;
  return std::min(1.0, (u - u0 * u0.dot(u)).norm());
}

template <typename Scalar>
Vec<Scalar> alternating_minimization(const Frame<Scalar>& a, const RealVector& b, const Vec<Scalar>& x_init,
                                     int max_iter, double tol) {
  require(b.size() == a.rows() && x_init.size() == a.cols(), "alternating_minimization: dimension mismatch");
  Eigen::ColPivHouseholderQR<Mat<Scalar>> qr(a.matrix());
  qr.setThreshold(1e-12);
  if (qr.rank() < a.cols()) fail(ErrorCode::kRankDeficient, "alternating_minimization: frame is rank deficient");
  Vec<Scalar> x = x_init;
  for (int k = 0; k < max_iter; ++k) {
    const Vec<Scalar> ax = a.matrix() * x;
    Vec<Scalar> rhs(ax.size());
    for (Index i = 0; i < ax.size(); ++i) {
      const double mag = std::abs(ax(i));
      rhs(i) = mag > 0 ? ax(i) / mag * b(i) : Scalar(b(i));
    }
    const Vec<Scalar> next = qr.solve(rhs);
    const double step = (next - x).norm();
    x = next;
    if (step <= tol * x.norm()) break;
  }
  return x;
}

double truncated_second_moment(double a) {
  require(a >= 0, "truncated_second_moment: a must be nonnegative");
  const double phi = std::exp(-0.5 * a * a) / std::sqrt(2.0 * M_PI);
  return std::erf(a / std::sqrt(2.0)) - 2.0 * a * phi;
}

namespace {

// Inverse of t -> P(|g| <= t) for g ~ N(0,1), by bisection.
double half_normal_quantile(double p) {
  double lo = 0.0, hi = 40.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (std::erf(mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

MomentStats truncated_moment_stats(const RealMatrix& a, const RealVector& x0, double frac_I) {
  const Index N = a.rows();
  const Index n = a.cols();
  require(x0.size() == n && x0.norm() > 0, "truncated_moment_stats: bad x0");
  require(frac_I > 0 && frac_I <= 1, "truncated_moment_stats: frac_I must lie in (0,1]");
  const RealVector norms = a.rowwise().norm();
  require((norms.array() > 0).all(), "truncated_moment_stats: zero row");
  const RealVector b = ((std::sqrt(static_cast<double>(n)) * norms.cwiseInverse()).asDiagonal() * a *
                        (x0 / x0.norm()))
                           .cwiseAbs();
  std::vector<double> sorted(b.data(), b.data() + N);
  std::sort(sorted.begin(), sorted.end());
  const Index n_i = std::max<Index>(1, static_cast<Index>(std::llround(frac_I * static_cast<double>(N))));
  double sum = 0.0;
  for (Index i = 0; i < n_i; ++i) sum += sorted[static_cast<std::size_t>(i)] * sorted[static_cast<std::size_t>(i)];
  MomentStats s;
  const double p = static_cast<double>(n_i) / static_cast<double>(N);
  s.measured = std::sqrt(sum / static_cast<double>(n_i));
  s.prediction = std::sqrt(M_PI / 6.0) * p;
  s.exact = std::sqrt(truncated_second_moment(half_normal_quantile(p)) / p);
  return s;
}

ClosenessTerms closeness_terms(const RealMatrix& a_i, const RealVector& x0, const RealVector& x_min) {
  require(a_i.cols() == x0.size() && x0.size() == x_min.size(), "closeness_terms: dimension mismatch");
  const RealVector u0 = x0 / x0.norm();
  const RealVector um = x_min / x_min.norm();
  ClosenessTerms t;
  t.alpha1 = u0.dot(um);
  const double s = std::sqrt(std::max(0.0, 1.0 - t.alpha1 * t.alpha1));
  RealVector x1;
  if (s > 1e-14) {
    const RealVector w = (u0 - t.alpha1 * um) / s;
    x1 = -s * um + t.alpha1 * w;
  } else {
    // x0 = +-x_min: any unit vector orthogonal to x0 works.
    x1 = null_space<double>(RealMatrix(u0.transpose()), 1e-12).col(0);
  }
  const double a2 = t.alpha1 * t.alpha1;
  t.lhs = (2.0 - a2) * (a_i * u0).squaredNorm();
  t.rhs = (1.0 - a2) * (a_i * x1).squaredNorm();
  return t;
}

#define RANKONE_INSTANTIATE(S)                                                                        \
  template Mat<S> z_update<S>(const Mat<S>&, const RealVector&, double, const Mat<S>*);               \
  template double z_row_objective<S>(const Vec<S>&, const Vec<S>&, double, double);                   \
  template Rank1Result<S> run_rank1_adm<S>(const Frame<S>&, const RealVector&, const Vec<S>&,         \
                                           const AdmOptions&);                                        \
  template Mat<S> range_projector<S>(const Frame<S>&);                                                \
  template ProjectedResult<S> run_projected_adm<S>(const Mat<S>&, const RealVector&, const Vec<S>&,   \
                                                   const AdmOptions&, bool);                          \
  template Mat<S> sigma_boost_factor<S>(const Mat<S>&, double);                                       \
  template void normalize_global_phase<S>(Vec<S>&);                                                   \
  template Vec<S> extract_signal<S>(const LinearMap<S>&, const Mat<S>&, const RealVector&);           \
  template RankRResult<S> run_rankr_adm<S>(const LinearMap<S>&, const RealVector&, const Mat<S>&,     \
                                           const RankROptions&);                                      \
  template Mat<S> take_rows<S>(const Mat<S>&, const std::vector<Index>&);                             \
  template SpectralInitResult<S> spectral_init<S>(const Frame<S>&, const RealVector&,                 \
                                                  const SpectralInitConfig&);                         \
  template Vec<S> sign_recovery<S>(const Mat<S>&, const RealVector&, const Vec<S>&, int*);            \
  template double recovery_error<S>(const Vec<S>&, const Vec<S>&);                                    \
  template Vec<S> alternating_minimization<S>(const Frame<S>&, const RealVector&, const Vec<S>&, int, \
                                              double);

RANKONE_INSTANTIATE(double)
RANKONE_INSTANTIATE(Complex)
#undef RANKONE_INSTANTIATE

}  // namespace rankone
