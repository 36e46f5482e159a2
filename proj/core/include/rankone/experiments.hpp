#pragma once

// Experiment drivers. Each driver returns a typed result; report.hpp turns
// results into CSV/JSON. Trial t of cell c uses derive_seed(seed, c * 1e6 + t).

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rankone/factored.hpp"
#include "rankone/fourier.hpp"
#include "rankone/lifted.hpp"

namespace rankone {

enum class ExperimentKind {
  kTable1,
  kTable2,
  kNoise,
  kFailure,
  kSelection,
  kSpectralInit,
  kFourier,
  kStandardizeDemo,
};

const char* to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& name);

enum class SnrConvention { kNorm, kSquared };

struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::kTable1;
  std::vector<Index> n_values{5};
  int trials = 10;
  double beta = 0.0;  // 0 selects the per-experiment default
  double gamma = 0.01;
  std::vector<Index> r_values{1};
  Seed seed{2024};
  std::string output_dir = ".";
  int threads = 1;

  int max_iter = 0;     // 0 selects the per-experiment default
  double tol = 0.0;     // 0 selects the per-experiment default
  double success_tol = 1e-3;
  std::vector<std::string> solvers;   // table1: pocs-A, pocs-Q, sigma1-A, sigma1-Q
  std::vector<std::string> n_rules;   // table2: 2n-1, 3n-1, 4n-2
  Index big_n = 0;                    // N for noise/failure/selection/spectral-init (0 = default)
  double snr_db = 29.0;
  SnrConvention snr_convention = SnrConvention::kNorm;
  double frac_I = 0.375;
  std::vector<std::string> inits{"random"};  // random, spectral; fourier also takes positive
  Index image_side = 32;
  std::string image_path;
  double oversampling = 1.23;
  std::vector<std::string> illuminations{"random-phase"};
  bool write_files = true;
};

/// Parses the versioned JSON config ("schema": 1). Unknown or mistyped
/// fields throw Error(kInvalidArgument) naming the field.
ExperimentSpec spec_from_json(const std::string& text, ExperimentKind kind);
std::string spec_to_json(const ExperimentSpec& spec);

/// Runs fn(0..count-1) on `threads` workers. Exceptions are rethrown.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

Seed trial_seed(Seed root, std::uint64_t cell, std::uint64_t trial);

/// Gaussian noise on b^2 scaled to the target SNR; returns max(b0^2 + eta, 0).
struct NoisyMeasurement {
  RealVector b;
  RealVector b_sq;
  double snr_db = 0.0;  // realised, same convention
};
NoisyMeasurement add_noise(const RealVector& b0, double snr_db, SnrConvention conv, Rng& rng);
double snr_of(const RealVector& b0, const RealVector& noise, SnrConvention conv);

// ---- table 1 / table 2 ----------------------------------------------------

struct SuccessCell {
  std::string label;                     // e.g. "n=10" or "n=10,N=3n-1"
  Index n = 0;
  Index big_n = 0;
  std::map<std::string, int> successes;  // solver -> count
  std::map<std::string, std::vector<double>> errors;
  std::map<std::string, std::vector<int>> iterations;
  std::vector<std::uint64_t> seeds;
};

struct SuccessTable {
  std::vector<SuccessCell> cells;
  int trials = 0;
  double wall_seconds = 0.0;
};

SuccessTable run_table1(const ExperimentSpec& spec);
SuccessTable run_table2(const ExperimentSpec& spec);

// ---- noise -----------------------------------------------------------------

struct ErrorSeries {
  std::string label;
  std::vector<double> errors;
  double median() const;
};

struct NoiseResult {
  std::vector<ErrorSeries> series;  // one per (r, init)
  std::vector<double> realized_snr;
  std::vector<std::uint64_t> seeds;
  double wall_seconds = 0.0;
};

NoiseResult run_noise(const ExperimentSpec& spec);

// ---- failure ---------------------------------------------------------------

struct FailureResult {
  std::vector<double> plain_residual;     // final relative residual, (A, b)
  std::vector<double> rescaled_residual;  // (b^-1 A, 1)
  std::vector<bool> plain_monotone;
  std::vector<bool> rescaled_monotone;
  std::vector<std::vector<double>> plain_traces;
  std::vector<std::vector<double>> rescaled_traces;
  std::vector<std::uint64_t> seeds;
  int plain_failures = 0;
  int rescaled_failures = 0;
  double wall_seconds = 0.0;
};

FailureResult run_failure(const ExperimentSpec& spec);

// ---- selection ---------------------------------------------------------------

struct SelectionResult {
  std::vector<ErrorSeries> series;  // smallest, largest, combined, random
  std::vector<std::uint64_t> seeds;
  double wall_seconds = 0.0;
};

SelectionResult run_selection(const ExperimentSpec& spec);

/// The four 200-of-400 style subsets for measurements b (indices into b).
std::map<std::string, std::vector<Index>> selection_subsets(const RealVector& b, Index k, Rng& rng);

// ---- spectral init -----------------------------------------------------------

struct SpectralStudy {
  std::vector<double> xmin_error;
  std::vector<double> random_error;
  std::vector<double> sign_recovery_error;
  std::vector<double> altmin_from_xmin;
  std::vector<double> altmin_from_random;
  std::vector<double> closeness_slack;  // lhs - rhs of the closeness inequality
  std::vector<std::uint64_t> seeds;
  double wall_seconds = 0.0;
};

SpectralStudy run_spectral_init(const ExperimentSpec& spec);

// ---- fourier -----------------------------------------------------------------

struct FourierTrial {
  std::uint64_t seed = 0;
  std::string illumination;
  std::map<Index, double> error;     // r -> normalized reconstruction error
  std::map<Index, double> residual;  // r -> final relative residual
  double snr_db = 0.0;
};

struct FourierResult {
  std::vector<FourierTrial> trials;
  Index side = 0;
  Index padded = 0;
  double wall_seconds = 0.0;
};

FourierResult run_fourier(const ExperimentSpec& spec);

/// Positive synthetic test image (background plus Gaussian blobs), row-major.
RealVector synthetic_image(Index side, Rng& rng);

/// ||x/||x|| - x0/||x0|||| after aligning the global phase of x to x0.
double normalized_reconstruction_error(const ComplexVector& x, const RealVector& x0);

// ---- standardization ---------------------------------------------------------

struct StandardizeTrial {
  Index big_n = 0;
  Index n = 0;
  double defect = 0.0;     // max |(QQ^T)_ii - n/N|
  double agreement = 0.0;  // max relative difference of D* from two starts
  bool monotone = true;    // trace of D*^-1 D^k nonincreasing
  double worst_increase = 0.0;
  int iterations = 0;
  bool converged = true;
};

struct StandardizeStudy {
  std::vector<StandardizeTrial> trials;
  double wall_seconds = 0.0;
};

StandardizeStudy run_standardize_demo(const ExperimentSpec& spec,
                                      const std::vector<std::pair<Index, Index>>& sizes);

/// Checks trace(D*^-1 T(D^k)) <= trace(D*^-1 D^k)(1 + slack) along a history.
double trace_monotonicity_violation(const StandardizationResult& run, const RealVector& d_star);

}  // namespace rankone
