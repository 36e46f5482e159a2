#include <gtest/gtest.h>

#include "rankone/error.hpp"
#include "rankone/frames.hpp"

using namespace rankone;

TEST(Frames, GaussianShapeAndReproducibility) {
  const auto a = gaussian_frame<double>(7, 3, Seed(1));
  const auto b = gaussian_frame<double>(7, 3, Seed(1));
  EXPECT_EQ(a.rows(), 7);
  EXPECT_EQ(a.cols(), 3);
  EXPECT_EQ(a.matrix(), b.matrix());
  EXPECT_FALSE(a.is_standardized());
}

TEST(Frames, RejectsNonFinite) {
  RealMatrix m = RealMatrix::Ones(3, 2);
  m(1, 1) = std::nan("");
  EXPECT_THROW(Frame<double>(m, "bad"), Error);
}

TEST(Frames, QrStandardizeGivesOrthonormalColumns) {
  const auto a = gaussian_frame<Complex>(12, 4, Seed(2));
  const auto [q, r] = qr_standardize(a);
  EXPECT_TRUE(q.is_standardized());
  EXPECT_LT(q.orthonormality_defect(), 1e-12);
  EXPECT_LT((q.matrix() * r - a.matrix()).norm(), 1e-12 * a.matrix().norm());
  for (Index k = 0; k < 4; ++k) {
    EXPECT_GE(r(k, k).real(), 0.0);
    EXPECT_NEAR(r(k, k).imag(), 0.0, 1e-14);
  }
}

TEST(Frames, QrStandardizeRejectsRankDeficient) {
  RealMatrix m(4, 2);
  m << 1, 2, 2, 4, 3, 6, 4, 8;
  EXPECT_THROW(qr_standardize(Frame<double>(m, "rank1")), Error);
}

// D* of a fixed 4x2 frame, frozen from an independent root-finder on
// diag(Q Q^T) = n/N with the normalization sum ||a_i||^2 / D_i = N.
TEST(Frames, EqualNormFixedPointFrozen) {
  RealMatrix a(4, 2);
  a << 1, 2, 0.5, -1, 2, 0.3, -1, 1;
  const auto res = equal_norm_standardize(a);
  RealVector expect(4);
  expect << 8.934782608695668, 0.865305522914219, 7.36375000000001, 1.388513513513512;
  EXPECT_LT((res.d - expect).cwiseQuotient(expect).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(equal_norm_defect<double>(res.q), 1e-9);
  // Q = D^-1/2 A B^-1.
  const RealMatrix rebuilt = res.d.cwiseSqrt().asDiagonal() * res.q * res.b;
  EXPECT_LT((rebuilt - a).norm(), 1e-10);
}

TEST(Frames, EqualNormMatchesAlternatingNormalization) {
  const auto a = gaussian_frame<double>(20, 7, Seed(3));
  const auto res = equal_norm_standardize(a.matrix());
  const RealMatrix q2 = qr_normalize_standardize(a.matrix(), 1e-12, 100000);
  // Same projector Q Q^T from both routes.
  EXPECT_LT((res.q * res.q.transpose() - q2 * q2.transpose()).norm(), 1e-7);
}

TEST(Frames, EqualNormRejectsSquareFrame) {
  EXPECT_THROW(equal_norm_standardize(RealMatrix::Identity(3, 3)), Error);
}

TEST(Frames, EqualNormNoConvergenceIsReported) {
  StandardizeOptions opt;
  opt.max_iter = 1;
  opt.tol = 1e-15;
  try {
    equal_norm_standardize(gaussian_frame<double>(20, 7, Seed(4)).matrix(), opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoConvergence);
  }
}

TEST(Frames, RankStar) {
  EXPECT_TRUE(check_rank_star(gaussian_frame<double>(6, 3, Seed(5))));
  RealMatrix m(4, 2);
  m << 1, 0, 2, 0, 0, 1, 1, 1;  // rows 0 and 1 are parallel
  EXPECT_FALSE(check_rank_star(Frame<double>(m, "par")));
}

TEST(Frames, SpecialFrameShapes) {
  Rng rng(Seed(6));
  const RealVector x0 = rng.unit_vector<double>(4);
  EXPECT_EQ(special_frame<double>(SpecialKind::kOrthogonalComplement, 4, x0, Seed(1)).rows(), 6);
  const auto sm = special_frame<double>(SpecialKind::kSignMatched, 4, x0, Seed(1));
  EXPECT_EQ(sm.cols(), 4);
  EXPECT_THROW(special_frame<double>(SpecialKind::kChainComplex, 4, x0, Seed(1)), Error);
  EXPECT_EQ(special_kind_from_string(to_string(SpecialKind::kChain)), SpecialKind::kChain);
}

TEST(Frames, MeasureKeepsGroundTruth) {
  const auto a = gaussian_frame<Complex>(5, 2, Seed(7));
  ComplexVector x(2);
  x << Complex(1, 1), Complex(0, -2);
  const auto m = measure(a, x);
  EXPECT_LT((m.b - (a.matrix() * x).cwiseAbs()).norm(), 1e-14);
  ASSERT_TRUE(m.ground_truth.has_value());
}
