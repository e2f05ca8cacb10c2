#include <gtest/gtest.h>

#include <cmath>

#include "ldap/geometry.hpp"

using namespace ldap;

namespace {

double max_gram_error(const Subspace& v) {
  const Matrix g = v.basis().transpose() * v.basis();
  return (g - Matrix::Identity(v.dim_sub(), v.dim_sub())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Orthonormalize, IdentityIsKept) {
  const Subspace v = orthonormalize(Matrix::Identity(3, 3));
  EXPECT_EQ(v.dim_sub(), 3);
  EXPECT_LT((v.basis() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Orthonormalize, SingleColumnIsNormalized) {
  Matrix m(2, 1);
  m << 2.0, 0.0;
  const Subspace v = orthonormalize(m);
  ASSERT_EQ(v.dim_sub(), 1);
  EXPECT_DOUBLE_EQ(v.basis()(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(v.basis()(1, 0), 0.0);
}

TEST(Orthonormalize, RandomGaussianGram) {
  Rng rng(11);
  Matrix m(5, 3);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  const Subspace v = orthonormalize(m);
  EXPECT_EQ(v.dim_sub(), 3);
  EXPECT_LT(max_gram_error(v), 1e-10);
  // same column space: each input column is reproduced by its projection
  for (Eigen::Index j = 0; j < 3; ++j) {
    EXPECT_LT((v.project(m.col(j)) - m.col(j)).norm(), 1e-10);
  }
}

TEST(Orthonormalize, DropsDependentColumns) {
  Matrix m(3, 3);
  m << 1, 2, 0,
       0, 0, 1,
       0, 0, 0;
  const Subspace v = orthonormalize(m);
  EXPECT_EQ(v.dim_sub(), 2);
  EXPECT_LT(max_gram_error(v), 1e-12);
}

TEST(Orthonormalize, ZeroMatrixThrows) {
  try {
    orthonormalize(Matrix::Zero(4, 2));
    FAIL() << "expected ZeroRank";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ZeroRank);
  }
}

TEST(Project, AxisProjection) {
  Matrix m(2, 1);
  m << 1.0, 0.0;
  const Subspace v = orthonormalize(m);
  Vector x(2);
  x << 3.0, 4.0;
  const Vector p = project(v, x);
  EXPECT_DOUBLE_EQ(p[0], 3.0);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
}

TEST(Project, FullSpaceIsIdentity) {
  Rng rng(3);
  const Subspace v = Subspace::full_space(6);
  const Vector x = standard_normal_vector(6, rng);
  EXPECT_LT((v.project(x) - x).norm(), 1e-15);
}

TEST(Project, DimensionMismatch) {
  const Subspace v = Subspace::full_space(3);
  try {
    v.project(Vector::Ones(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

TEST(Project, PropertiesOnRandomInputs) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.uniform() * 30);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(d));
    const Subspace v = sample_random_subspace(d, std::min(k, d), rng);
    const Vector x = standard_normal_vector(d, rng);
    const Vector y = standard_normal_vector(d, rng);
    const Vector px = v.project(x);
    EXPECT_LT((v.project(px) - px).norm(), 1e-9);                          // idempotent
    EXPECT_NEAR(px.dot(y), x.dot(v.project(y)), 1e-9);                      // self-adjoint
    EXPECT_LE(px.norm(), x.norm() + 1e-9);                                  // contraction
    EXPECT_LT(max_gram_error(v), 1e-10);
  }
}

TEST(Project, NestedBasesAreMonotone) {
  Rng rng(5);
  const Eigen::Index d = 20;
  const Subspace v = sample_random_subspace(d, 4, rng);
  Matrix ext(d, 9);
  ext.leftCols(4) = v.basis();
  for (Eigen::Index j = 4; j < 9; ++j) ext.col(j) = standard_normal_vector(d, rng);
  const Subspace w = orthonormalize(ext);
  ASSERT_EQ(w.dim_sub(), 9);
  for (int i = 0; i < 500; ++i) {
    const Vector x = standard_normal_vector(d, rng);
    EXPECT_LE(v.projection_norm(x), w.projection_norm(x) + 1e-12);
  }
}

TEST(RandomSubspace, FullDimensionIsIdentityProjector) {
  Rng rng(8);
  const Subspace v = sample_random_subspace(5, 5, rng);
  const Matrix p = v.basis() * v.basis().transpose();
  EXPECT_LT((p - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RandomSubspace, InvalidDimensions) {
  Rng rng(1);
  EXPECT_THROW(sample_random_subspace(3, 0, rng), Error);
  EXPECT_THROW(sample_random_subspace(3, 4, rng), Error);
}

TEST(RandomSubspace, ProjectionMassMatchesKOverD) {
  // E ||Pi_V u||^2 = k/d for a Haar subspace.
  Rng rng(77);
  const Eigen::Index d = 40, k = 10;
  Vector u = Vector::Zero(d);
  u[0] = 1.0;
  const int n = 2000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double q = std::pow(sample_random_subspace(d, k, rng).projection_norm(u), 2);
    sum += q;
    sum2 += q * q;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_NEAR(mean, 0.25, 3.0 * se);
}

TEST(RandomSubspace, ConcentrationTail) {
  // P(||Pi_V u|| < sqrt(k/d) - t) <= 2 exp(-t^2 d / 2), d=100 k=25 t=0.2.
  Rng rng(99);
  Vector u = Vector::Zero(100);
  u[3] = 1.0;
  const int n = 2000;
  int good = 0;
  for (int i = 0; i < n; ++i) good += sample_random_subspace(100, 25, rng).projection_norm(u) >= 0.3;
  const double frac = static_cast<double>(good) / n;
  const double se = std::sqrt(frac * (1 - frac) / n);
  EXPECT_GE(frac, 1.0 - 2.0 * std::exp(-2.0) - 3.0 * se);
}

TEST(Rng, SplitIsDeterministicAndDistinct) {
  Rng a(42), b(42);
  EXPECT_EQ(a.split(3).next_u64(), b.split(3).next_u64());
  EXPECT_NE(a.split(3).next_u64(), a.split(4).next_u64());
  Rng c(42);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.normal(), c.normal());
}
