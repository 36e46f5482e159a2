#pragma once

// Measurement frames: generation, measurement, and standardization.

#include <optional>
#include <string>
#include <vector>

#include "rankone/random.hpp"
#include "rankone/types.hpp"

namespace rankone {

/// N x n measurement matrix. Row i holds the conjugated sensing vector, so
/// measurement i is |(A x)_i|. Immutable once built.
template <typename Scalar>
class Frame {
 public:
  Frame() = default;
  explicit Frame(Mat<Scalar> entries, std::string id = {});

  /// Builds a frame flagged standardized; throws unless Q^H Q = I to 1e-10.
  static Frame standardized(Mat<Scalar> q, std::string id = {});

  const Mat<Scalar>& matrix() const { return a_; }
  Index rows() const { return a_.rows(); }
  Index cols() const { return a_.cols(); }
  bool is_standardized() const { return standardized_; }
  const std::string& id() const { return id_; }
  static constexpr Field field() { return field_of<Scalar>(); }

  /// max |Q^H Q - I| entry.
  double orthonormality_defect() const;

 private:
  Mat<Scalar> a_;
  std::string id_;
  bool standardized_ = false;
};

template <typename Scalar>
struct MeasurementSet {
  RealVector b;
  RealVector b_sq;
  std::string frame_id;
  std::optional<Vec<Scalar>> ground_truth;
  std::optional<double> snr_db;
};

struct StandardizationResult {
  RealVector d;
  RealMatrix q;
  RealMatrix b;
  int iterations = 0;
  double residual = 0.0;
  // Per-iteration record: scaled iterate D^k (history[0] = D^0) and the raw
  // map output T(D^k) before rescaling, for the trace-monotonicity check.
  std::vector<RealVector> history;
  std::vector<RealVector> unscaled;
};

template <typename Scalar>
Frame<Scalar> gaussian_frame(Index N, Index n, Seed seed);

Frame<double> bernoulli_frame(Index N, Index n, Seed seed);

enum class SpecialKind { kSignMatched, kOrthogonalComplement, kChain, kChainComplex };

const char* to_string(SpecialKind kind);
SpecialKind special_kind_from_string(const std::string& name);

/// Test-case frames with known PhaseLift behaviour. `x0` must have length n.
/// sign-matched needs a real x0; chain-complex needs the complex field.
template <typename Scalar>
Frame<Scalar> special_frame(SpecialKind kind, Index n, const Vec<Scalar>& x0, Seed seed);

template <typename Scalar>
MeasurementSet<Scalar> measure(const Frame<Scalar>& a, const Vec<Scalar>& x);

/// Thin QR, A = Q R with Q flagged standardized and diag(R) >= 0.
template <typename Scalar>
std::pair<Frame<Scalar>, Mat<Scalar>> qr_standardize(const Frame<Scalar>& a);

struct StandardizeOptions {
  double tol = 1e-10;
  int max_iter = 10000;
  std::optional<RealVector> d0;   // default: all ones
  bool keep_history = false;
};

/// Equal-norm standardization of a real frame by the D fixed-point iteration.
StandardizationResult equal_norm_standardize(const RealMatrix& a,
                                             const StandardizeOptions& opt = {});

/// Cross-check: alternate row normalization to sqrt(n/N) and QR.
RealMatrix qr_normalize_standardize(const RealMatrix& a, double tol, int max_iter,
                                    int* iterations = nullptr);

/// Every n x n row submatrix nonsingular (sigma_min > 1e-10 ||A||).
template <typename Scalar>
bool check_rank_star(const Frame<Scalar>& a);

/// max_i |(Q Q^H)_ii - n/N|.
template <typename Scalar>
double equal_norm_defect(const Mat<Scalar>& q);

}  // namespace rankone
