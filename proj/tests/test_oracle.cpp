#include <gtest/gtest.h>

#include "properties.hpp"
#include "rankone/error.hpp"
#include "rankone/lifted.hpp"
#include "rankone/linalg.hpp"
#include "rankone/oracle.hpp"

using namespace rankone;

TEST(Oracle, UniqueSolutionAtTwoNMinusOne) {
  const auto a = gaussian_frame<double>(5, 3, Seed(1));
  Rng rng(Seed(2));
  const RealVector x0 = rng.unit_vector<double>(3);
  const auto set = enumerate_solutions(a.matrix(), (a.matrix() * x0).cwiseAbs());
  ASSERT_EQ(set.solutions.size(), 1u);
  EXPECT_LT(std::min((set.solutions[0] - x0).norm(), (set.solutions[0] + x0).norm()), 1e-10);
}

TEST(Oracle, EnumerateRejectsLargeN) {
  EXPECT_THROW(enumerate_solutions(RealMatrix::Ones(23, 2), RealVector::Ones(23)), Error);
}

TEST(Oracle, InjectivityThreshold) {
  EXPECT_TRUE(check_injectivity(gaussian_frame<double>(5, 3, Seed(3)).matrix()).injective);
  const RealMatrix a = gaussian_frame<double>(4, 3, Seed(3)).matrix();
  const auto res = check_injectivity(a);
  ASSERT_FALSE(res.injective);
  ASSERT_TRUE(res.witness.has_value());
  const auto& [x, xh] = *res.witness;
  EXPECT_LT(((a * x).cwiseAbs() - (a * xh).cwiseAbs()).norm(), 1e-10);
  EXPECT_GT(std::min((x - xh).norm(), (x + xh).norm()), 1e-3);
  // The witness yields two sign-distinct solutions for its own measurements.
  EXPECT_GE(enumerate_solutions(a, (a * x).cwiseAbs()).solutions.size(), 2u);
}

TEST(Oracle, FeasibleFamilyOfIdentityFrame) {
  // b = e on the identity frame: unit diagonal, three free off-diagonals.
  const auto fam = enumerate_feasible(RealMatrix::Identity(3, 3), RealVector::Ones(3), 21);
  EXPECT_EQ(fam.dimension, 3);
  EXPECT_TRUE(fam.bounded);
  ASSERT_GE(fam.argmax_sigma1, 0);
  // Trace is 3 on the whole family, so PSD members have sigma_1 <= 3.
  double best_psd = 0;
  for (const auto& s : fam.samples) {
    EXPECT_NEAR(s.x.trace(), 3.0, 1e-12);
    if (s.eigenvalues(2) >= -1e-12) best_psd = std::max(best_psd, s.eigenvalues(0));
  }
  EXPECT_LE(best_psd, 3.0 + 1e-12);
  EXPECT_GE(best_psd, 2.0);
}

TEST(OracleExamples, M3FamilyOnIdentityFrame) {
  const RealMatrix x = props::m3_family(0.5, 3.0);
  EXPECT_LT((apply_lift(Frame<double>(RealMatrix::Identity(3, 3), "I3"), x) - RealVector::Ones(3)).norm(), 1e-15);
  const DescendingEigen<double> eig(x);
  EXPECT_NEAR(eig.values(0), 1.5, 1e-12);
  EXPECT_NEAR(eig.values(1), 1.5, 1e-12);
  EXPECT_NEAR(eig.values(2), 0.0, 1e-12);
  EXPECT_NEAR(x.determinant(), 0.25 * 3.0 * (4.0 - 1.0 - 3.0), 1e-12);
}

namespace {
// The 4x3 frame whose measurements of e are (2, 1, 1, 4).
RealMatrix qr_example_frame() {
  RealMatrix a(4, 3);
  a << 1, 1, 0, 0, 1, 0, 0, 0, 1, 1, 1, 2;
  return a;
}

// Its PSD feasible set: the segment from e_hat e_hat^T (alpha = -1) to e e^T (alpha = 1).
RealMatrix qr_example_member(double alpha) {
  RealMatrix x(3, 3);
  x << 5 - 4 * alpha, 2 * alpha - 1, 2 - alpha, 2 * alpha - 1, 1, alpha, 2 - alpha, alpha, 1;
  return x;
}
}  // namespace

TEST(OracleExamples, QrExampleBeforeStandardization) {
  const Frame<double> a(qr_example_frame(), "ex");
  const RealVector e = RealVector::Ones(3);
  const RealVector b = (a.matrix() * e).cwiseAbs();
  EXPECT_EQ(b, (RealVector(4) << 2, 1, 1, 4).finished());
  const RealVector ehat = (RealVector(3) << 3, -1, 1).finished();
  EXPECT_LT((qr_example_member(-1) - outer<double>(ehat)).norm(), 1e-14);
  EXPECT_LT((qr_example_member(1) - outer<double>(e)).norm(), 1e-14);
  for (double alpha : {-1.0, -0.3, 0.4, 1.0}) {
    const RealMatrix x = qr_example_member(alpha);
    EXPECT_LT((apply_lift(a, x) - b.cwiseAbs2()).norm(), 1e-12);
    EXPECT_GE(DescendingEigen<double>(x).values(2), -1e-12);
  }
  // Four constraints on six unknowns: a 2-parameter affine family whose PSD
  // part is the segment above.
  const auto fam = enumerate_feasible(a.matrix(), b.cwiseAbs2(), 81);
  ASSERT_EQ(fam.dimension, 2);
  // The trace varies along the segment; sigma_1 peaks at e_hat e_hat^T, not x0 x0^T.
  EXPECT_NEAR(DescendingEigen<double>(qr_example_member(-1)).values(0), 11.0, 1e-12);
  EXPECT_NEAR(DescendingEigen<double>(qr_example_member(1)).values(0), 3.0, 1e-12);
  const auto& best = fam.samples[static_cast<std::size_t>(fam.argmax_sigma1)];
  EXPECT_GT(best.eigenvalues(0), 9.0);
  EXPECT_LT((best.x - outer<double>(ehat)).norm(), (best.x - outer<double>(e)).norm());
}

TEST(OracleExamples, QrExampleAfterStandardization) {
  const auto [q, r] = qr_standardize(Frame<double>(qr_example_frame(), "ex"));
  // R's first row is (sqrt 2, sqrt 2, sqrt 2).
  EXPECT_LT((r.row(0).transpose() - RealVector::Constant(3, std::sqrt(2.0))).norm(), 1e-12);
  const RealVector x0 = r * RealVector::Ones(3);
  const RealVector b_sq = (q.matrix() * x0).cwiseAbs2();
  // In Q coordinates the segment maps to R X R^T; its trace is constant,
  // so both rank-one ends tie in sigma_1 and x0 x0^T is one of them.
  const RealMatrix lo = r * qr_example_member(-1) * r.transpose();
  const RealMatrix hi = r * qr_example_member(1) * r.transpose();
  EXPECT_LT((hi - outer<double>(x0)).norm(), 1e-12);
  for (double alpha : {-1.0, 0.0, 1.0}) {
    const RealMatrix x = r * qr_example_member(alpha) * r.transpose();
    EXPECT_LT((apply_lift(q, x) - b_sq).norm(), 1e-10);
    EXPECT_NEAR(x.trace(), b_sq.sum(), 1e-10);
  }
  EXPECT_NEAR(DescendingEigen<double>(lo).values(0), DescendingEigen<double>(hi).values(0), 1e-10);
}

TEST(Oracle, ArgminCertificate) {
  auto f = [](const RealVector& v) { return v.squaredNorm(); };
  EXPECT_TRUE(grid_argmin_certificate(f, RealVector::Zero(2), 1.0, 200));
  EXPECT_FALSE(grid_argmin_certificate(f, RealVector::Ones(2), 1.0, 200));
}
