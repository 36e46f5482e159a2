#pragma once

#include <complex>
#include <cstdint>
#include <type_traits>

#include <Eigen/Dense>

namespace rankone {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealMatrix = Mat<double>;
using ComplexMatrix = Mat<Complex>;
using RealVector = Vec<double>;
using ComplexVector = Vec<Complex>;

enum class Field { kReal, kComplex };

template <typename Scalar>
inline constexpr bool kIsComplex = Eigen::NumTraits<Scalar>::IsComplex;

template <typename Scalar>
constexpr Field field_of() {
  return kIsComplex<Scalar> ? Field::kComplex : Field::kReal;
}

const char* to_string(Field field);

/// Seed for the counter-based streams in random.hpp.
struct Seed {
  std::uint64_t value = 0;
  constexpr Seed() = default;
  constexpr explicit Seed(std::uint64_t v) : value(v) {}
  friend constexpr bool operator==(Seed, Seed) = default;
};

}  // namespace rankone
