#include <gtest/gtest.h>

#include "properties.hpp"

using namespace rankone;

constexpr int kCases = 1000;

TEST(Properties, ZUpdateCertificates) { EXPECT_EQ(props::z_update_certificates(kCases, Seed(101)), 0); }
TEST(Properties, SigmaBoostCertificates) { EXPECT_EQ(props::sigma_boost_certificates(kCases, Seed(102)), 0); }
TEST(Properties, ProjectionIdempotence) { EXPECT_EQ(props::projection_idempotence(kCases, Seed(103)), 0); }
TEST(Properties, AdjointIdentity) { EXPECT_EQ(props::adjoint_identity(kCases, Seed(104)), 0); }
TEST(Properties, TraceConservation) { EXPECT_EQ(props::trace_conservation(kCases, Seed(105)), 0); }
TEST(Properties, ProjectedFormEquivalence) { EXPECT_EQ(props::projected_equivalence(kCases, Seed(106)), 0); }
TEST(Properties, RecoveryErrorPhaseInvariance) { EXPECT_EQ(props::phase_invariance(kCases, Seed(107)), 0); }
TEST(Properties, M3Determinant) { EXPECT_EQ(props::m3_determinant(kCases, Seed(108)), 0); }
TEST(Properties, ClosenessInequality) { EXPECT_EQ(props::closeness_inequality(kCases, Seed(109)), 0); }
