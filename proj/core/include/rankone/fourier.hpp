#pragma once

// Oversampled 2-D Fourier frames with optional random-phase illumination.

#include "rankone/operator.hpp"

namespace rankone {

enum class Illumination { kUniform, kRandomPhase };

const char* to_string(Illumination illum);

/// x (h*w, row-major) -> DFT2(zero_pad(mask .* x)) on an H x W grid with
/// H = ceil(h sqrt(os)), W = ceil(w sqrt(os)). Unnormalized forward DFT.
class FourierOperator {
 public:
  FourierOperator(Index height, Index width, double oversampling, Illumination illum, Seed seed);

  Index height() const { return h_; }
  Index width() const { return w_; }
  Index padded_height() const { return ph_; }
  Index padded_width() const { return pw_; }
  Index rows() const { return ph_ * pw_; }
  Index cols() const { return h_ * w_; }
  const ComplexVector& mask() const { return mask_; }

  ComplexMatrix apply(const ComplexMatrix& x) const;
  ComplexMatrix adjoint(const ComplexMatrix& z) const;
  ComplexMatrix dense() const;

  /// The map scaled by 1/sqrt(H W), which has orthonormal columns.
  LinearMap<Complex> standardized_map() const;

 private:
  Index h_, w_, ph_, pw_;
  ComplexVector mask_;
};

Frame<Complex> fourier_frame(Index height, Index width, double oversampling,
                             Illumination illum, Seed seed);

}  // namespace rankone
