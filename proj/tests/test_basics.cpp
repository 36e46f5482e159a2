#include <gtest/gtest.h>

#include <sstream>

#include "rankone/error.hpp"
#include "rankone/matrix_io.hpp"
#include "rankone/random.hpp"

using namespace rankone;

TEST(Random, SameSeedSameStream) {
  Rng a(Seed(7)), b(Seed(7));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.bits(), b.bits());
}

TEST(Random, DerivedStreamsDiffer) {
  EXPECT_NE(derive_seed(Seed(1), 0).value, derive_seed(Seed(1), 1).value);
  EXPECT_NE(derive_seed(Seed(1), 0).value, derive_seed(Seed(2), 0).value);
  EXPECT_EQ(derive_seed(Seed(1), 5).value, derive_seed(Seed(1), 5).value);
}

TEST(Random, BelowStaysInRange) {
  Rng rng(Seed(3));
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(7), 7u);
}

TEST(Random, UnitVectorHasUnitNorm) {
  Rng rng(Seed(4));
  EXPECT_NEAR(rng.unit_vector<Complex>(9).norm(), 1.0, 1e-14);
  EXPECT_NEAR(rng.unit_vector<double>(3).norm(), 1.0, 1e-14);
}

TEST(MatrixIo, RealRoundTrip) {
  Rng rng(Seed(5));
  const RealMatrix m = rng.normal_matrix<double>(4, 3);
  std::stringstream ss;
  write_matrix(ss, m);
  const auto back = std::get<RealMatrix>(read_matrix(ss));
  EXPECT_EQ(back, m);
}

TEST(MatrixIo, ComplexRoundTrip) {
  Rng rng(Seed(6));
  const ComplexMatrix m = rng.normal_matrix<Complex>(3, 2);
  std::stringstream ss;
  write_matrix(ss, m);
  const auto back = std::get<ComplexMatrix>(read_matrix(ss));
  EXPECT_EQ(back, m);
}

TEST(MatrixIo, ParseComplexForms) {
  EXPECT_EQ(parse_complex("1.5"), Complex(1.5, 0));
  EXPECT_EQ(parse_complex("1-2j"), Complex(1, -2));
  EXPECT_EQ(parse_complex("-3e-2+4.5e+1j"), Complex(-0.03, 45));
  EXPECT_EQ(parse_complex("2j"), Complex(0, 2));
  EXPECT_THROW(parse_complex("abc"), Error);
}

TEST(MatrixIo, BadEntryNamesRow) {
  std::stringstream ss("2 2 real\n1 2\n3 x\n");
  try {
    read_matrix(ss);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(MatrixIo, BadHeaderRejected) {
  std::stringstream ss("2 2 quaternion\n1 2\n3 4\n");
  EXPECT_THROW(read_matrix(ss), Error);
}

TEST(MatrixIo, MissingFileIsIoError) {
  try {
    read_matrix_file("/nonexistent/frame.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(MatrixIo, MeasurementJson) {
  const auto m = measurement_from_json(R"({"b": [1, 2.5], "frame_id": "g", "snr_db": 30})");
  EXPECT_EQ(m.b.size(), 2);
  EXPECT_DOUBLE_EQ(m.b_sq(1), 6.25);
  EXPECT_EQ(m.frame_id, "g");
  EXPECT_THROW(measurement_from_json(R"({"b": [1, -2]})"), Error);
  EXPECT_THROW(measurement_from_json(R"({"c": 1})"), Error);
}
