#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldap/geometry.hpp"
#include "ldap/samplers.hpp"

namespace ldap {

/**
 * A classifier feature map f : R^d -> R. The negative decision region is
 * C = {f <= 0}; its complement C' = {f > 0} is the region under attack.
 *
 * Implementations are immutable and value()/gradient() are safe to call
 * concurrently.
 */
class Region {
 public:
  virtual ~Region() = default;

  virtual Eigen::Index dim() const = 0;
  virtual std::string kind() const = 0;

  double value(const Vector& x) const {
    check_dim(x.size(), dim(), kind().c_str());
    return value_impl(x);
  }
  Vector gradient(const Vector& x) const {
    check_dim(x.size(), dim(), kind().c_str());
    return gradient_impl(x);
  }

  bool in_negative(const Vector& x) const { return value(x) <= 0.0; }
  bool in_positive(const Vector& x) const { return value(x) > 0.0; }

  /// Global Lipschitz constant of the gradient on C', when known analytically.
  virtual std::optional<double> lipschitz_bound() const { return std::nullopt; }

  /// True when f is convex, so C is convex.
  virtual bool is_convex() const { return false; }

 protected:
  virtual double value_impl(const Vector& x) const = 0;
  virtual Vector gradient_impl(const Vector& x) const = 0;
};

/// f(x) = x^T w - b with unit w.
class HalfSpace final : public Region {
 public:
  HalfSpace(Vector w, double b) : b_(b) {
    const double n = w.norm();
    require(w.size() >= 1, Errc::InvalidDimension, "half-space normal is empty");
    require(n > 0.0 && std::isfinite(n), Errc::BadShape, "half-space normal must be nonzero");
    w_ = w / n;
  }
  Eigen::Index dim() const override { return w_.size(); }
  std::string kind() const override { return "halfspace"; }
  const Vector& normal() const { return w_; }
  double offset() const { return b_; }
  std::optional<double> lipschitz_bound() const override { return 0.0; }
  bool is_convex() const override { return true; }

 protected:
  double value_impl(const Vector& x) const override { return x.dot(w_) - b_; }
  Vector gradient_impl(const Vector&) const override { return w_; }

 private:
  Vector w_;
  double b_;
};

enum class BallOrientation {
  InsideNegative,  // f = (|x|^2 - r^2)/2, C is the ball
  InsidePositive,  // f = (r^2 - |x|^2)/2, C' is the open ball
};

class Ball final : public Region {
 public:
  Ball(Eigen::Index d, double r, BallOrientation orientation = BallOrientation::InsideNegative)
      : d_(d), r_(r), orientation_(orientation) {
    require(d >= 1, Errc::InvalidDimension, "ball needs d >= 1");
    require(r > 0.0 && std::isfinite(r), Errc::BadShape, "ball radius must be positive");
  }
  Eigen::Index dim() const override { return d_; }
  std::string kind() const override { return "ball"; }
  double radius() const { return r_; }
  BallOrientation orientation() const { return orientation_; }
  std::optional<double> lipschitz_bound() const override { return 1.0; }
  bool is_convex() const override { return orientation_ == BallOrientation::InsideNegative; }

 protected:
  double value_impl(const Vector& x) const override {
    return sign() * (x.squaredNorm() - r_ * r_) / 2.0;
  }
  Vector gradient_impl(const Vector& x) const override { return sign() * x; }

 private:
  double sign() const { return orientation_ == BallOrientation::InsideNegative ? 1.0 : -1.0; }
  Eigen::Index d_;
  double r_;
  BallOrientation orientation_;
};

/// f(x) = (x^T B x - r^2)/2 with B symmetric PSD.
class Ellipsoid final : public Region {
 public:
  Ellipsoid(Matrix b, double r) : b_(std::move(b)), r_(r) {
    require(b_.rows() >= 1 && b_.rows() == b_.cols(), Errc::BadShape, "ellipsoid matrix must be square");
    require(b_.allFinite(), Errc::BadShape, "ellipsoid matrix has non-finite entries");
    require(r > 0.0 && std::isfinite(r), Errc::BadShape, "ellipsoid radius must be positive");
    const double asym = (b_ - b_.transpose()).cwiseAbs().maxCoeff();
    require(asym <= 1e-10, Errc::BadShape, "ellipsoid matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(b_, Eigen::EigenvaluesOnly);
    require(eig.eigenvalues().minCoeff() >= -1e-10, Errc::BadShape,
            "ellipsoid matrix is not positive semi-definite");
    op_norm_ = eig.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::Index dim() const override { return b_.rows(); }
  std::string kind() const override { return "ellipsoid"; }
  const Matrix& shape() const { return b_; }
  double radius() const { return r_; }
  std::optional<double> lipschitz_bound() const override { return op_norm_; }
  bool is_convex() const override { return true; }

 protected:
  double value_impl(const Vector& x) const override { return (x.dot(b_ * x) - r_ * r_) / 2.0; }
  Vector gradient_impl(const Vector& x) const override { return b_ * x; }

 private:
  Matrix b_;
  double r_;
  double op_norm_ = 0.0;
};

/**
 * C = intersection of half-spaces {x^T w_i <= b_i}, f = max_i (x^T w_i - b_i).
 * The gradient is the normal of the lowest-index maximizer.
 */
class Polytope final : public Region {
 public:
  /// normals: N x d, one unit normal per row (rows are normalized here).
  Polytope(Matrix normals, Vector offsets, Vector witness)
      : w_(std::move(normals)), b_(std::move(offsets)), witness_(std::move(witness)) {
    require(w_.rows() >= 1 && w_.cols() >= 1, Errc::BadShape, "polytope needs N >= 1 normals");
    check_dim(b_.size(), w_.rows(), "polytope offsets");
    check_dim(witness_.size(), w_.cols(), "polytope witness");
    for (Eigen::Index i = 0; i < w_.rows(); ++i) {
      const double n = w_.row(i).norm();
      require(n > 0.0 && std::isfinite(n), Errc::BadShape, "polytope normal must be nonzero");
      w_.row(i) /= n;
    }
    require(value_impl(witness_) <= 0.0, Errc::BadShape, "polytope witness is not inside C");
  }
  Eigen::Index dim() const override { return w_.cols(); }
  std::string kind() const override { return "polytope"; }
  Eigen::Index facets() const { return w_.rows(); }
  const Matrix& normals() const { return w_; }
  const Vector& offsets() const { return b_; }
  const Vector& witness() const { return witness_; }
  bool is_convex() const override { return true; }

  /// Per-facet values x^T w_i - b_i.
  Vector facet_values(const Vector& x) const {
    check_dim(x.size(), dim(), "polytope");
    return w_ * x - b_;
  }

 protected:
  double value_impl(const Vector& x) const override { return (w_ * x - b_).maxCoeff(); }
  Vector gradient_impl(const Vector& x) const override {
    Eigen::Index arg = 0;
    (w_ * x - b_).maxCoeff(&arg);  // first maximizer on ties
    return w_.row(arg).transpose();
  }

 private:
  Matrix w_;
  Vector b_;
  Vector witness_;
};

/// C' = open cube (-h, h)^d, f = h - max_i |x_i|.
class Cube final : public Region {
 public:
  Cube(Eigen::Index d, double half_width) : d_(d), h_(half_width) {
    require(d >= 1, Errc::InvalidDimension, "cube needs d >= 1");
    require(half_width > 0.0 && std::isfinite(half_width), Errc::BadShape,
            "cube half width must be positive");
  }
  Eigen::Index dim() const override { return d_; }
  std::string kind() const override { return "cube"; }
  double half_width() const { return h_; }
  double volume() const { return std::pow(2.0 * h_, static_cast<double>(d_)); }

 protected:
  double value_impl(const Vector& x) const override { return h_ - x.cwiseAbs().maxCoeff(); }
  Vector gradient_impl(const Vector& x) const override {
    Eigen::Index arg = 0;
    x.cwiseAbs().maxCoeff(&arg);
    Vector g = Vector::Zero(d_);
    g[arg] = x[arg] >= 0.0 ? -1.0 : 1.0;
    return g;
  }

 private:
  Eigen::Index d_;
  double h_;
};

/**
 * Pointwise margin max(f(x), 0)/||grad f(x)||. Zero on C; throws ZeroGradient
 * when f(x) > 0 and the gradient vanishes.
 */
inline double margin(const Region& region, const Vector& x) {
  const double f = region.value(x);
  if (f <= 0.0) return 0.0;
  const double g = region.gradient(x).norm();
  if (g < 1e-12) throw Error(Errc::ZeroGradient, "margin undefined: vanishing gradient at a point of C'");
  return f / g;
}

/// Polytope with N random unit normals and offsets uniform in [b_lo, b_hi] (> 0), so the origin is in C.
inline Polytope random_polytope(Eigen::Index d, Eigen::Index n_facets, double b_lo, double b_hi, Rng& rng) {
  require(n_facets >= 1, Errc::BadShape, "polytope needs N >= 1");
  require(b_lo >= 0.0 && b_hi >= b_lo, Errc::BadShape, "polytope offsets must satisfy 0 <= lo <= hi");
  Matrix w(n_facets, d);
  Vector b(n_facets);
  for (Eigen::Index i = 0; i < n_facets; ++i) {
    w.row(i) = random_unit_vector(d, rng).transpose();
    b[i] = rng.uniform(b_lo, b_hi);
  }
  return Polytope(std::move(w), std::move(b), Vector::Zero(d));
}

/**
 * Draws from sampler until `n` points land in C'. Gives up with
 * EmptyConditional after `max_attempts` draws (0 means 100 n).
 */
inline std::vector<Vector> sample_positive(const Region& region, const Sampler& sampler, std::size_t n,
                                           Rng& rng, std::size_t max_attempts = 0) {
  check_dim(sampler.dim(), region.dim(), "sampler");
  if (max_attempts == 0) max_attempts = 100 * std::max<std::size_t>(n, 1);
  std::vector<Vector> out;
  out.reserve(n);
  std::size_t attempts = 0;
  while (out.size() < n && attempts < max_attempts) {
    ++attempts;
    Vector x = sampler.draw(rng);
    if (region.value(x) > 0.0) out.push_back(std::move(x));
  }
  if (out.size() < n) {
    throw Error(Errc::EmptyConditional, "only " + std::to_string(out.size()) + " of " + std::to_string(n) +
                                            " samples landed in C' after " + std::to_string(attempts) +
                                            " draws");
  }
  return out;
}

}  // namespace ldap
