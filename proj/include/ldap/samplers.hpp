#pragma once

#include <cmath>
#include <memory>
#include <string>

#include "ldap/geometry.hpp"

namespace ldap {

/// Source of i.i.d. data points in R^d.
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual Eigen::Index dim() const = 0;
  virtual Vector draw(Rng& rng) const = 0;
  virtual std::string describe() const = 0;
};

/// N(0, sigma^2 I_d).
class GaussianSampler final : public Sampler {
 public:
  GaussianSampler(Eigen::Index d, double sigma) : d_(d), sigma_(sigma) {
    require(d >= 1, Errc::InvalidDimension, "gaussian sampler needs d >= 1");
    require(sigma > 0.0 && std::isfinite(sigma), Errc::BadShape, "sigma must be positive");
  }
  Eigen::Index dim() const override { return d_; }
  double sigma() const { return sigma_; }
  Vector draw(Rng& rng) const override { return sigma_ * standard_normal_vector(d_, rng); }
  std::string describe() const override { return "gaussian(sigma=" + std::to_string(sigma_) + ")"; }

 private:
  Eigen::Index d_;
  double sigma_;
};

/// Uniform on the centered ball of radius r: Gaussian direction times r U^{1/d}.
class UniformBallSampler final : public Sampler {
 public:
  UniformBallSampler(Eigen::Index d, double r) : d_(d), r_(r) {
    require(d >= 1, Errc::InvalidDimension, "ball sampler needs d >= 1");
    require(r > 0.0 && std::isfinite(r), Errc::BadShape, "radius must be positive");
  }
  Eigen::Index dim() const override { return d_; }
  double radius() const { return r_; }
  Vector draw(Rng& rng) const override {
    Vector dir = random_unit_vector(d_, rng);
    const double radius = r_ * std::pow(rng.uniform(), 1.0 / static_cast<double>(d_));
    return radius * dir;
  }
  std::string describe() const override { return "uniform_ball(r=" + std::to_string(r_) + ")"; }

 private:
  Eigen::Index d_;
  double r_;
};

/// Uniform on the centered cube [-h, h]^d.
class UniformCubeSampler final : public Sampler {
 public:
  UniformCubeSampler(Eigen::Index d, double half_width) : d_(d), h_(half_width) {
    require(d >= 1, Errc::InvalidDimension, "cube sampler needs d >= 1");
    require(half_width > 0.0 && std::isfinite(half_width), Errc::BadShape,
            "half width must be positive");
  }
  Eigen::Index dim() const override { return d_; }
  double half_width() const { return h_; }
  Vector draw(Rng& rng) const override {
    Vector x(d_);
    for (Eigen::Index i = 0; i < d_; ++i) x[i] = rng.uniform(-h_, h_);
    return x;
  }
  std::string describe() const override { return "uniform_cube(h=" + std::to_string(h_) + ")"; }

 private:
  Eigen::Index d_;
  double h_;
};

}  // namespace ldap
