#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lagflow/tensor.hpp"

using namespace lagflow;

namespace {

SmallMatrix rotated_diag3(double a, double b, double c, double angle) {
  SmallMatrix d(3), r = SmallMatrix::identity(3);
  d(0, 0) = a;
  d(1, 1) = b;
  d(2, 2) = c;
  r(0, 0) = std::cos(angle);
  r(0, 1) = -std::sin(angle);
  r(1, 0) = std::sin(angle);
  r(1, 1) = std::cos(angle);
  SmallMatrix r2 = SmallMatrix::identity(3);
  r2(1, 1) = std::cos(0.7);
  r2(1, 2) = -std::sin(0.7);
  r2(2, 1) = std::sin(0.7);
  r2(2, 2) = std::cos(0.7);
  const SmallMatrix q = r * r2;
  return q * d * transpose(q);
}

}  // namespace

TEST(SymmetricEigenvalues, TwoByTwoClosedForm) {
  SmallMatrix m(2);
  m(0, 0) = 2.0;
  m(0, 1) = m(1, 0) = 1.0;
  m(1, 1) = 2.0;
  const auto ev = symmetric_eigenvalues(m);
  EXPECT_NEAR(ev[0], 1.0, 1e-15);
  EXPECT_NEAR(ev[1], 3.0, 1e-15);
}

TEST(SymmetricEigenvalues, ThreeByThreeDistinct) {
  const auto ev = symmetric_eigenvalues(rotated_diag3(-0.3, 0.05, 1.7, 0.4));
  EXPECT_NEAR(ev[0], -0.3, 1e-13);
  EXPECT_NEAR(ev[1], 0.05, 1e-13);
  EXPECT_NEAR(ev[2], 1.7, 1e-13);
}

TEST(SymmetricEigenvalues, ThreeByThreeRepeated) {
  const auto ev = symmetric_eigenvalues(rotated_diag3(0.2, 0.2, -0.1, 1.1));
  EXPECT_NEAR(ev[0], -0.1, 1e-7);
  EXPECT_NEAR(ev[1], 0.2, 1e-7);
  EXPECT_NEAR(ev[2], 0.2, 1e-7);
  const auto zero = symmetric_eigenvalues(SmallMatrix(3));
  for (double e : zero) EXPECT_EQ(e, 0.0);
}

TEST(SmallMatrix, InverseAndCholesky) {
  const SmallMatrix m = rotated_diag3(1.0, 2.0, 4.0, 0.3);
  const SmallMatrix p = m * inverse(m);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(p(i, j), i == j ? 1.0 : 0.0, 1e-14);
  EXPECT_NEAR(determinant(m), 8.0, 1e-13);
  SmallMatrix l;
  ASSERT_TRUE(cholesky(m, l));
  const SmallMatrix back = l * transpose(l);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(back(i, j), m(i, j), 1e-14);
  EXPECT_FALSE(cholesky(rotated_diag3(1.0, -1.0, 2.0, 0.2), l));
}
