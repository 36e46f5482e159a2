#pragma once

#include <functional>
#include <memory>
#include <string>

#include "rankone/frames.hpp"

namespace rankone {

/// Matrix-free linear map C^n -> C^N acting column-wise on n x r blocks.
template <typename Scalar>
struct LinearMap {
  Index rows = 0;
  Index cols = 0;
  bool standardized = false;
  std::function<Mat<Scalar>(const Mat<Scalar>&)> apply;
  std::function<Mat<Scalar>(const Mat<Scalar>&)> adjoint;
};

template <typename Scalar>
LinearMap<Scalar> dense_map(const Frame<Scalar>& frame) {
  LinearMap<Scalar> m;
  m.rows = frame.rows();
  m.cols = frame.cols();
  m.standardized = frame.is_standardized();
  // Copy so the map stays valid after the frame goes out of scope.
  auto owned = std::make_shared<Mat<Scalar>>(frame.matrix());
  m.apply = [owned](const Mat<Scalar>& x) -> Mat<Scalar> { return (*owned) * x; };
  m.adjoint = [owned](const Mat<Scalar>& z) -> Mat<Scalar> { return owned->adjoint() * z; };
  return m;
}

}  // namespace rankone
