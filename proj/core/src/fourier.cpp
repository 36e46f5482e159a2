#include "rankone/fourier.hpp"

#include <cmath>
#include <memory>

#include <unsupported/Eigen/FFT>

#include "rankone/error.hpp"

namespace rankone {

const char* to_string(Illumination illum) {
  return illum == Illumination::kUniform ? "uniform" : "random-phase";
}

FourierOperator::FourierOperator(Index height, Index width, double oversampling,
                                 Illumination illum, Seed seed)
    : h_(height), w_(width) {
  require(height >= 1 && width >= 1, "fourier_frame: image size must be positive");
  require(oversampling >= 1.0, "fourier_frame: oversampling must be >= 1");
  const double s = std::sqrt(oversampling);
  // Guard against 2*sqrt(1)=2.0000000001-style rounding before ceil.
  ph_ = static_cast<Index>(std::ceil(static_cast<double>(h_) * s - 1e-9));
  pw_ = static_cast<Index>(std::ceil(static_cast<double>(w_) * s - 1e-9));
  mask_ = ComplexVector::Ones(h_ * w_);
  if (illum == Illumination::kRandomPhase) {
    Rng rng(seed);
    for (Index j = 0; j < mask_.size(); ++j) mask_(j) = std::polar(1.0, 2.0 * M_PI * rng.uniform());
  }
}

namespace {

// In-place 2-D transform of a row-major rows x cols grid.
void fft2(Eigen::FFT<double>& fft, ComplexVector& grid, Index rows, Index cols, bool inverse) {
  std::vector<Complex> in, out;
  in.resize(static_cast<std::size_t>(cols));
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) in[static_cast<std::size_t>(c)] = grid(r * cols + c);
    inverse ? fft.inv(out, in) : fft.fwd(out, in);
    for (Index c = 0; c < cols; ++c) grid(r * cols + c) = out[static_cast<std::size_t>(c)];
  }
  in.resize(static_cast<std::size_t>(rows));
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) in[static_cast<std::size_t>(r)] = grid(r * cols + c);
    inverse ? fft.inv(out, in) : fft.fwd(out, in);
    for (Index r = 0; r < rows; ++r) grid(r * cols + c) = out[static_cast<std::size_t>(r)];
  }
}

}  // namespace

ComplexMatrix FourierOperator::apply(const ComplexMatrix& x) const {
  require(x.rows() == cols(), "fourier apply: dimension mismatch");
  Eigen::FFT<double> fft;
  ComplexMatrix out(rows(), x.cols());
  ComplexVector grid(rows());
  for (Index k = 0; k < x.cols(); ++k) {
    grid.setZero();
    for (Index r = 0; r < h_; ++r)
      for (Index c = 0; c < w_; ++c) grid(r * pw_ + c) = mask_(r * w_ + c) * x(r * w_ + c, k);
    fft2(fft, grid, ph_, pw_, false);
    out.col(k) = grid;
  }
  return out;
}

ComplexMatrix FourierOperator::adjoint(const ComplexMatrix& z) const {
  require(z.rows() == rows(), "fourier adjoint: dimension mismatch");
  Eigen::FFT<double> fft;
  const double m = static_cast<double>(rows());
  ComplexMatrix out(cols(), z.cols());
  ComplexVector grid(rows());
  for (Index k = 0; k < z.cols(); ++k) {
    grid = z.col(k);
    fft2(fft, grid, ph_, pw_, true);  // scaled by 1/M
    for (Index r = 0; r < h_; ++r)
      for (Index c = 0; c < w_; ++c)
        out(r * w_ + c, k) = std::conj(mask_(r * w_ + c)) * grid(r * pw_ + c) * m;
  }
  return out;
}

ComplexMatrix FourierOperator::dense() const {
  return apply(ComplexMatrix::Identity(cols(), cols()));
}

LinearMap<Complex> FourierOperator::standardized_map() const {
  auto self = std::make_shared<FourierOperator>(*this);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows()));
  LinearMap<Complex> m;
  m.rows = rows();
  m.cols = cols();
  m.standardized = true;
  m.apply = [self, scale](const ComplexMatrix& x) -> ComplexMatrix { return self->apply(x) * scale; };
  m.adjoint = [self, scale](const ComplexMatrix& z) -> ComplexMatrix { return self->adjoint(z) * scale; };
  return m;
}

Frame<Complex> fourier_frame(Index height, Index width, double oversampling, Illumination illum,
                             Seed seed) {
  FourierOperator op(height, width, oversampling, illum, seed);
  return Frame<Complex>(op.dense(), "fourier");
}

}  // namespace rankone
