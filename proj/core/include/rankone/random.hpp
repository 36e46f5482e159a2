#pragma once

#include <cstdint>
#include <random>

#include "rankone/types.hpp"

namespace rankone {

// SplitMix64 finalizer; used to derive independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Child seed for stream `stream` of `parent`. Distinct streams give
/// statistically independent generators.
Seed derive_seed(Seed parent, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(Seed seed) : engine_(mix_seed(seed.value)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  template <typename Scalar>
  Scalar normal_scalar() {
    if constexpr (kIsComplex<Scalar>) {
      const double re = normal();
      return Scalar(re, normal());
    } else {
      return normal();
    }
  }

  template <typename Scalar>
  Mat<Scalar> normal_matrix(Index rows, Index cols) {
    Mat<Scalar> m(rows, cols);
    // Row-major fill so the draw order matches "row i is sensing vector i".
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = normal_scalar<Scalar>();
    return m;
  }

  template <typename Scalar>
  Vec<Scalar> normal_vector(Index size) {
    Vec<Scalar> v(size);
    for (Index i = 0; i < size; ++i) v(i) = normal_scalar<Scalar>();
    return v;
  }

  /// Uniform on the unit sphere of the scalar field.
  template <typename Scalar>
  Vec<Scalar> unit_vector(Index size) {
    Vec<Scalar> v = normal_vector<Scalar>(size);
    return v / v.norm();
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace rankone
