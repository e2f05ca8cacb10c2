#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "ldap/error.hpp"
#include "ldap/rng.hpp"

namespace ldap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void check_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw Error(Errc::DimensionMismatch, std::string(what) + ": expected dimension " +
                                             std::to_string(want) + ", got " + std::to_string(got));
  }
}

inline Vector standard_normal_vector(Eigen::Index d, Rng& rng) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.normal();
  return v;
}

/// Uniform direction on the unit sphere of R^d.
inline Vector random_unit_vector(Eigen::Index d, Rng& rng) {
  Vector v;
  double n = 0.0;
  do {
    v = standard_normal_vector(d, rng);
    n = v.norm();
  } while (n < 1e-300);
  return v / n;
}

/**
 * A k-dimensional linear subspace of R^d held as a d x k matrix with
 * orthonormal columns. Immutable once built; construct through
 * orthonormalize(), full_space() or sample_random_subspace().
 */
class Subspace {
 public:
  Eigen::Index dim_ambient() const noexcept { return basis_.rows(); }
  Eigen::Index dim_sub() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }

  /// Coordinates of the projection in the basis, B^T x.
  Vector coordinates(const Vector& x) const {
    check_dim(x.size(), dim_ambient(), "Subspace::coordinates");
    return basis_.transpose() * x;
  }

  /// Orthogonal projection B B^T x.
  Vector project(const Vector& x) const { return basis_ * coordinates(x); }

  /// ||Pi_V x|| without forming the projection.
  double projection_norm(const Vector& x) const { return coordinates(x).norm(); }

  static Subspace full_space(Eigen::Index d) {
    require(d >= 1, Errc::InvalidDimension, "ambient dimension must be >= 1");
    return Subspace(Matrix::Identity(d, d));
  }

  friend Subspace orthonormalize(const Matrix& m);

 private:
  explicit Subspace(Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
};

/**
 * Modified Gram-Schmidt with one re-orthogonalization pass. Columns whose
 * residual falls below 1e-10 times the largest input column norm are dropped,
 * so k is the numerical rank. Deterministic in column order.
 */
inline Subspace orthonormalize(const Matrix& m) {
  require(m.rows() >= 1 && m.cols() >= 1, Errc::InvalidDimension, "empty matrix");
  require(m.allFinite(), Errc::InvalidDimension, "matrix has non-finite entries");
  double max_norm = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) max_norm = std::max(max_norm, m.col(j).norm());
  if (max_norm == 0.0) throw Error(Errc::ZeroRank, "all columns are zero");
  const double tol = 1e-10 * max_norm;

  Matrix q(m.rows(), std::min(m.rows(), m.cols()));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < m.cols() && k < m.rows(); ++j) {
    Vector v = m.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < k; ++i) v -= q.col(i).dot(v) * q.col(i);
    }
    const double n = v.norm();
    if (n <= tol) continue;
    q.col(k++) = v / n;
  }
  if (k == 0) throw Error(Errc::ZeroRank, "matrix is numerically rank zero");
  return Subspace(q.leftCols(k));
}

/// Haar-distributed k-dimensional subspace: orthonormalized d x k Gaussian matrix.
inline Subspace sample_random_subspace(Eigen::Index d, Eigen::Index k, Rng& rng) {
  if (!(k >= 1 && k <= d)) {
    throw Error(Errc::InvalidDimension,
                "need 1 <= k <= d, got k=" + std::to_string(k) + " d=" + std::to_string(d));
  }
  Matrix g(d, k);
  // Column-major fill so the stream order matches column order.
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.normal();
  return orthonormalize(g);
}

inline Vector project(const Subspace& v, const Vector& x) { return v.project(x); }

}  // namespace ldap
