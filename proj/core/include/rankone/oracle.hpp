#pragma once

// Brute-force ground truth for small real instances.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rankone/frames.hpp"

namespace rankone {

struct SolutionSet {
  std::vector<RealVector> solutions;  // one representative per +-pair
  bool exhaustive = true;
};

/// All x with |Ax| = b, up to sign, by solving Ax = s o b for every sign
/// pattern with s_1 = +1. Requires N <= 22.
SolutionSet enumerate_solutions(const RealMatrix& a, const RealVector& b);

std::string solution_set_to_json(const SolutionSet& s);

struct InjectivityResult {
  bool injective = true;
  // x, x_hat with |Ax| = |A x_hat| and x != +-x_hat, when not injective.
  std::optional<std::pair<RealVector, RealVector>> witness;
  std::vector<bool> split;  // the row partition behind the witness
};

/// x -> |Ax| is injective up to sign iff no row partition S, S^c has
/// nontrivial null spaces on both sides. Requires N <= 22, n <= 6.
InjectivityResult check_injectivity(const RealMatrix& a);

struct FeasibleSample {
  RealVector params;
  RealMatrix x;
  RealVector eigenvalues;  // decreasing
};

struct FeasibleFamily {
  RealMatrix particular;           // least-norm solution of A(X) = b^2
  std::vector<RealMatrix> basis;   // Frobenius-orthonormal null directions
  Index dimension = 0;
  bool consistent = true;          // A(X) = b^2 solvable at all
  bool bounded = true;             // grid radius from a trace bound
  double radius = 0.0;
  double spacing = 0.0;
  std::vector<FeasibleSample> samples;  // grid points within the PSD band
  Index argmax_sigma1 = -1;             // into samples
  std::vector<Index> local_maxima;      // grid-local sigma_1 maximizers
  // For dimension 1: the exact parameter interval where X is PSD (bisection).
  std::optional<std::pair<double, double>> interval;

  RealMatrix at(const RealVector& t) const;
};

/// Parametrizes {X symmetric : A(X) = b^2} by a null-space basis, grids the
/// parameters with `grid` points per axis and keeps points whose smallest
/// eigenvalue is >= -(spacing sqrt(d) / 2), the Lipschitz slack that keeps
/// lower-dimensional PSD regions visible. Requires n <= 4 and d <= 3.
FeasibleFamily enumerate_feasible(const RealMatrix& a, const RealVector& b_sq, int grid = 41);

/// True iff objective(center) <= objective(center + p) + 1e-10 for `samples`
/// random perturbations p drawn uniformly from the ball of `radius`.
bool grid_argmin_certificate(const std::function<double(const RealVector&)>& objective,
                             const RealVector& center, double radius, int samples, Seed seed = Seed(1));

}  // namespace rankone
