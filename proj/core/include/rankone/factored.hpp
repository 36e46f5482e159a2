#pragma once

// Vector-space and rank-r alternating direction solvers, spectral
// initialization and sign recovery.

#include <string>
#include <vector>

#include "rankone/frames.hpp"
#include "rankone/operator.hpp"

namespace rankone {

/// Row-wise minimizer of 1/2 (||z_i|| - b_i)^2 + beta/2 ||u_i - z_i||^2:
/// z_i = (u_i/||u_i||) (b_i + beta ||u_i||) / (1 + beta).
/// A zero row u_i takes the direction of prev's row i when given and
/// nonzero, else e_1.
template <typename Scalar>
Mat<Scalar> z_update(const Mat<Scalar>& u, const RealVector& b, double beta,
                     const Mat<Scalar>* prev = nullptr);

/// Row objective minimized by z_update.
template <typename Scalar>
double z_row_objective(const Vec<Scalar>& z_row, const Vec<Scalar>& u_row, double b, double beta);

enum class AdmStatus { kSolved, kStationary, kMaxIter };

const char* to_string(AdmStatus s);

struct AdmOptions {
  double beta = 0.01;
  int max_iter = 5000;
  double tol = 1e-8;              // relative residual ||(|Ax| - b)|| / ||b||; < 0 disables
  double stationary_tol = 1e-12;  // relative iterate change for a non-global fixed point; < 0 disables
};

template <typename Scalar>
struct Rank1Result {
  Vec<Scalar> x;
  Vec<Scalar> z;
  Vec<Scalar> lambda_hat;  // lambda / beta
  std::vector<double> trace;  // ||(|Ax| - b)|| per iteration
  AdmStatus status = AdmStatus::kMaxIter;
  int iterations = 0;

  bool converged() const { return status != AdmStatus::kMaxIter; }
};

/// Vector ADM: z <- z_update(Ax + lambda/beta), x <- A^+(z - lambda/beta),
/// lambda <- lambda + beta (Ax - z).
template <typename Scalar>
Rank1Result<Scalar> run_rank1_adm(const Frame<Scalar>& a, const RealVector& b, const Vec<Scalar>& x_init,
                                  const AdmOptions& opt = {});

template <typename Scalar>
struct ProjectedResult {
  Vec<Scalar> z;
  Vec<Scalar> lambda_hat;
  std::vector<double> trace;  // ||(|Pz| - b)||
  std::vector<Vec<Scalar>> z_history;
  std::vector<Vec<Scalar>> lambda_history;
  AdmStatus status = AdmStatus::kMaxIter;
  int iterations = 0;
};

/// Projected form: z <- z_update(Pz + lambda_hat), lambda_hat <- (I - P)(lambda_hat - z),
/// started from lambda_hat = 0.
template <typename Scalar>
ProjectedResult<Scalar> run_projected_adm(const Mat<Scalar>& p, const RealVector& b, const Vec<Scalar>& z0,
                                          const AdmOptions& opt = {}, bool keep_history = false);

/// P = Q Q^H for a standardized frame.
template <typename Scalar>
Mat<Scalar> range_projector(const Frame<Scalar>& q);

/// Multiplier-first follows the printed rank-r loop (z, lambda from the old
/// y, then y). Multiplier-last updates lambda after y, matching the vector ADM.
enum class UpdateOrder { kMultiplierFirst, kMultiplierLast };

struct RankROptions {
  Index r = 1;
  double beta = 0.01;
  double gamma = 0.01;  // sigma_1 boost, in units of ||b||
  int max_iter = 5000;
  double tol = 1e-8;
  double step_tol = 1e-12;  // stop when ||y_k+1 - y_k|| <= step_tol ||y||
  UpdateOrder order = UpdateOrder::kMultiplierFirst;
  bool real_signal = false;  // restrict y to real entries (complex frames)
  bool trace_sigma = false;
};

template <typename Scalar>
struct RankRResult {
  Vec<Scalar> x;
  Mat<Scalar> y;
  std::vector<double> residual_trace;  // ||(|Qy| - b)||, row norms
  std::vector<double> sigma_trace;
  AdmStatus status = AdmStatus::kMaxIter;
  int iterations = 0;
};

template <typename Scalar>
RankRResult<Scalar> run_rankr_adm(const LinearMap<Scalar>& q, const RealVector& b, const Mat<Scalar>& y0,
                                  const RankROptions& opt = {});

/// y-step: SVD U D V^H of w, returns U (D + g e1 e1^T) V^H.
template <typename Scalar>
Mat<Scalar> sigma_boost_factor(const Mat<Scalar>& w, double g);

/// Leading left singular vector of y scaled so ||(|Q x|)|| best fits b.
template <typename Scalar>
Vec<Scalar> extract_signal(const LinearMap<Scalar>& q, const Mat<Scalar>& y, const RealVector& b);

/// Rotate x so that sum(x) is real positive (falls back to first-entry phase).
template <typename Scalar>
void normalize_global_phase(Vec<Scalar>& x);

struct SpectralInitConfig {
  double frac_I = 0.375;
  double frac_II = 0.0;  // 0 selects max(n, ceil(N/4))
};

struct SpectralPartition {
  std::vector<Index> small;   // I
  std::vector<Index> large;   // II
  std::vector<Index> middle;  // III
};

template <typename Scalar>
struct SpectralInitResult {
  Vec<Scalar> x_min;
  SpectralPartition partition;
  Mat<Scalar> a_normalized;  // rows scaled to unit norm
  RealVector b_normalized;   // b_i / ||a_i||
  std::vector<std::string> warnings;
};

template <typename Scalar>
SpectralInitResult<Scalar> spectral_init(const Frame<Scalar>& a, const RealVector& b,
                                         const SpectralInitConfig& cfg = {});

/// Least-squares solution of A_II x = u o b_II with u the phase of A_II x_est.
template <typename Scalar>
Vec<Scalar> sign_recovery(const Mat<Scalar>& a_ii, const RealVector& b_ii, const Vec<Scalar>& x_est,
                          int* undefined_signs = nullptr);

/// Rows of m selected by idx.
template <typename Scalar>
Mat<Scalar> take_rows(const Mat<Scalar>& m, const std::vector<Index>& idx);
RealVector take(const RealVector& v, const std::vector<Index>& idx);

/// sqrt(1 - |<x, x0>|^2) for the normalized vectors.
template <typename Scalar>
double recovery_error(const Vec<Scalar>& x, const Vec<Scalar>& x0);

/// Sign/phase-fitting alternating minimization: x <- A^+(phase(Ax) o b).
template <typename Scalar>
Vec<Scalar> alternating_minimization(const Frame<Scalar>& a, const RealVector& b, const Vec<Scalar>& x_init,
                                     int max_iter = 500, double tol = 1e-12);

/// E[t^2; |t| <= a] for t ~ N(0, 1).
double truncated_second_moment(double a);

struct MomentStats {
  double measured = 0.0;    // N_I^{-1/2} ||b_I||
  double prediction = 0.0;  // sqrt(pi/6) N_I / N
  double exact = 0.0;       // the same statistic from the exact truncated moment
};

/// Rows are rescaled to norm sqrt(n) so a_i . x0 ~ N(0, 1) for unit x0.
MomentStats truncated_moment_stats(const RealMatrix& a, const RealVector& x0, double frac_I);

struct ClosenessTerms {
  double alpha1 = 0.0;
  double lhs = 0.0;  // (2 - alpha1^2) ||A_I x0||^2
  double rhs = 0.0;  // (1 - alpha1^2) ||A_I x1||^2
};

/// Terms of the x_min closeness inequality for a unit x0 and x_min.
ClosenessTerms closeness_terms(const RealMatrix& a_i, const RealVector& x0, const RealVector& x_min);

}  // namespace rankone
