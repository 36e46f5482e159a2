#include <gtest/gtest.h>

#include "rankone/error.hpp"
#include "rankone/lifted.hpp"
#include "rankone/linalg.hpp"
#include "rankone/oracle.hpp"

using namespace rankone;

TEST(Lifted, ApplyMatchesRowQuadraticForms) {
  const auto a = gaussian_frame<Complex>(6, 3, Seed(1));
  Rng rng(Seed(2));
  const ComplexMatrix x = hermitian_part<Complex>(ComplexMatrix(rng.normal_matrix<Complex>(3, 3)));
  const RealVector y = apply_lift(a, x);
  for (Index i = 0; i < 6; ++i) {
    const ComplexVector row = a.matrix().row(i).transpose();
    const Complex v = row.transpose() * x * row.conjugate();
    EXPECT_NEAR(y(i), v.real(), 1e-12);
  }
}

TEST(Lifted, ApplyRejectsNonHermitian) {
  const auto a = gaussian_frame<double>(4, 2, Seed(1));
  RealMatrix x(2, 2);
  x << 1, 2, 0, 1;
  EXPECT_THROW(apply_lift(a, x), Error);
}

TEST(Lifted, GramFallsBackForDependentLifts) {
  // N = 8 > n(n+1)/2 = 6: the lifted rows are dependent.
  const auto a = gaussian_frame<double>(8, 3, Seed(3));
  GramFactor<double> g(a);
  EXPECT_EQ(g.method(), GramMethod::kPseudoInverse);
  EXPECT_EQ(g.rank(), 6);
  const auto b = gaussian_frame<double>(5, 3, Seed(3));
  EXPECT_EQ(GramFactor<double>(b).method(), GramMethod::kCholesky);
}

TEST(Lifted, SigmaBoostClosedForm) {
  RealMatrix m(2, 2);
  m << 2, 0, 0, -1;
  const RealMatrix x = psd_sigma_boost<double>(m, 0.5);
  EXPECT_NEAR(x(0, 0), 4.0, 1e-14);  // 2 + 1/beta
  EXPECT_NEAR(x(1, 1), 0.0, 1e-14);
  EXPECT_NEAR(x(0, 1), 0.0, 1e-14);
}

TEST(Lifted, AdmRecoversSmallRealInstance) {
  const auto a = gaussian_frame<double>(9, 5, Seed(4));
  Rng rng(Seed(5));
  const RealVector x0 = rng.unit_vector<double>(5);
  const auto q = qr_standardize(a);
  const RealVector b_sq = (a.matrix() * x0).cwiseAbs2();
  const auto rep = lifted_adm(q.first, b_sq, default_lifted_init(q.first, b_sq));
  const RealMatrix rinv = q.second.inverse();
  const RealMatrix x = rinv * rep.x_final * rinv.transpose();
  EXPECT_TRUE(rep.converged);
  EXPECT_LT(lifted_error(x, x0), 1e-3);
}

TEST(Lifted, WarnsOnNonStandardizedFrame) {
  const auto a = gaussian_frame<double>(9, 3, Seed(6));
  const RealVector b_sq = (a.matrix() * RealVector::Ones(3)).cwiseAbs2();
  LiftedOptions opt;
  opt.max_iter = 5;
  const auto rep = lifted_adm(a, b_sq, default_lifted_init(a, b_sq), opt);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(Lifted, TraceCsvHeader) {
  const auto q = qr_standardize(gaussian_frame<double>(6, 2, Seed(7))).first;
  const RealVector b_sq = (q.matrix() * RealVector::Ones(2)).cwiseAbs2();
  LiftedOptions opt;
  opt.max_iter = 3;
  opt.full_trace = true;
  const auto csv = lifted_trace_csv(lifted_adm(q, b_sq, default_lifted_init(q, b_sq), opt));
  EXPECT_EQ(csv.rfind("iter,gap,feasibility,sigma1\n", 0), 0u);
}

TEST(Lifted, ErrorAndBasin) {
  RealVector x0(2);
  x0 << 1, 0;
  const RealMatrix x = outer<double>(x0);
  EXPECT_NEAR(lifted_error(x, x0), 0.0, 1e-15);
  EXPECT_TRUE(basin_check(x, x0));
  RealMatrix other = RealMatrix::Zero(2, 2);
  other(1, 1) = 1.0;
  EXPECT_FALSE(basin_check(other, x0));
}

// The 6x3 counterexample frame with x0 = e_1: its PSD feasible set is
// diag(1 - 3mu, 2mu, mu).
namespace {
RealMatrix counterexample_frame() {
  const double s = std::sqrt(1.5), t = std::sqrt(3.0);
  RealMatrix a(6, 3);
  a << 1, 1, 1, 1, -1, -1, 1, s, 0, 1, -s, 0, 1, 0, t, 1, 0, -t;
  return a;
}
}  // namespace

TEST(LiftedExamples, CounterexampleFamily) {
  const RealMatrix a = counterexample_frame();
  const auto fam = enumerate_feasible(a, RealVector::Ones(6));
  ASSERT_TRUE(fam.consistent);
  ASSERT_EQ(fam.dimension, 1);
  ASSERT_TRUE(fam.interval.has_value());
  const RealMatrix lo = fam.at(RealVector::Constant(1, fam.interval->first));
  const RealMatrix hi = fam.at(RealVector::Constant(1, fam.interval->second));
  // One end is e1 e1^T (mu = 0), the other diag(0, 2/3, 1/3) (mu = 1/3).
  RealMatrix rank1 = RealMatrix::Zero(3, 3);
  rank1(0, 0) = 1;
  RealMatrix rank2 = RealMatrix::Zero(3, 3);
  rank2(1, 1) = 2.0 / 3.0;
  rank2(2, 2) = 1.0 / 3.0;
  const bool forward = (lo - rank1).norm() < 1e-6;
  EXPECT_LT(((forward ? lo : hi) - rank1).norm(), 1e-6);
  EXPECT_LT(((forward ? hi : lo) - rank2).norm(), 1e-6);
  // Every member is diagonal with the stated pattern.
  for (const auto& s : fam.samples) {
    const double mu = s.x(2, 2);
    EXPECT_NEAR(s.x(0, 0), 1 - 3 * mu, 1e-9);
    EXPECT_NEAR(s.x(1, 1), 2 * mu, 1e-9);
    EXPECT_NEAR(s.x(0, 1), 0, 1e-9);
  }
}
