#include <gtest/gtest.h>

#include "rankone/experiments.hpp"
#include "rankone/factored.hpp"
#include "rankone/fourier.hpp"

using namespace rankone;

TEST(Fourier, PaddedSizes) {
  const FourierOperator op(32, 32, 1.23, Illumination::kUniform, Seed(1));
  EXPECT_EQ(op.padded_height(), 36);  // ceil(32 * sqrt(1.23)) = ceil(35.49)
  EXPECT_EQ(op.rows(), 36 * 36);
  const FourierOperator exact(4, 4, 4.0, Illumination::kUniform, Seed(1));
  EXPECT_EQ(exact.padded_width(), 8);
}

TEST(Fourier, FastMatchesDense) {
  const FourierOperator op(5, 4, 2.0, Illumination::kRandomPhase, Seed(2));
  Rng rng(Seed(3));
  const ComplexMatrix x = rng.normal_matrix<Complex>(20, 2);
  const ComplexMatrix d = op.dense();
  EXPECT_LT((op.apply(x) - d * x).norm(), 1e-10 * (d * x).norm());
  const ComplexMatrix z = rng.normal_matrix<Complex>(op.rows(), 2);
  EXPECT_LT((op.adjoint(z) - d.adjoint() * z).norm(), 1e-10 * (d.adjoint() * z).norm());
}

TEST(Fourier, StandardizedMapHasOrthonormalColumns) {
  const FourierOperator op(6, 6, 1.5, Illumination::kRandomPhase, Seed(4));
  const auto q = op.standardized_map();
  EXPECT_TRUE(q.standardized);
  const ComplexMatrix eye = ComplexMatrix::Identity(36, 36);
  const ComplexMatrix gram = q.adjoint(q.apply(eye));
  EXPECT_LT((gram - eye).norm(), 1e-10);
}

TEST(Fourier, MaskHasUnitModulus) {
  const FourierOperator op(4, 4, 2.0, Illumination::kRandomPhase, Seed(5));
  EXPECT_LT((op.mask().cwiseAbs() - RealVector::Ones(16)).norm(), 1e-14);
  const FourierOperator flat(4, 4, 2.0, Illumination::kUniform, Seed(5));
  EXPECT_LT((flat.mask() - ComplexVector::Ones(16)).norm(), 1e-15);
}

// Noiseless 8x8 image started near itself: the residual goes to zero.
TEST(Fourier, PlantedConsistency) {
  Rng rng(Seed(6));
  const RealVector x0 = synthetic_image(8, rng);
  const FourierOperator op(8, 8, 4.0, Illumination::kUniform, Seed(7));
  const auto q = op.standardized_map();
  const RealVector b = q.apply(ComplexMatrix(x0.cast<Complex>())).col(0).cwiseAbs();
  RankROptions opt;
  opt.beta = 0.1;
  opt.gamma = 0.0;
  opt.real_signal = true;
  opt.max_iter = 2000;
  opt.tol = 1e-9;
  const ComplexMatrix y0 = (x0 + 1e-3 * rng.normal_vector<double>(64)).cast<Complex>();
  const auto res = run_rankr_adm(q, b, y0, opt);
  EXPECT_LT(res.residual_trace.back(), 1e-6 * b.norm());
  EXPECT_LT(normalized_reconstruction_error(res.x, x0), 1e-4);
}

TEST(Fourier, ReconstructionErrorIgnoresPhase) {
  Rng rng(Seed(8));
  const RealVector x0 = synthetic_image(4, rng);
  const ComplexVector x = std::polar(2.0, 1.1) * x0.cast<Complex>();
  EXPECT_LT(normalized_reconstruction_error(x, x0), 1e-14);
}
