#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ldap/regions.hpp"

namespace ldap {

/// eta(x) = grad f(x)/||grad f(x)||.
inline Vector gradient_direction(const Region& region, const Vector& x) {
  Vector g = region.gradient(x);
  const double n = g.norm();
  if (n < 1e-12) throw Error(Errc::ZeroGradient, "gradient direction undefined: vanishing gradient");
  return g / n;
}

/// ||Pi_V eta(x)||.
inline double projected_alignment(const Region& region, const Subspace& v, const Vector& x) {
  return v.projection_norm(gradient_direction(region, x));
}

/// Empirical second-moment matrix of unit gradient directions over C' samples.
struct GradientCovariance {
  Matrix sigma;
  std::size_t n_samples = 0;
  bool centered = true;
};

/**
 * centered:   (n-1)^{-1} sum (eta_i - mean)(eta_i - mean)^T
 * uncentered: n^{-1} sum eta_i eta_i^T   (trace 1)
 * Accumulated as a single n x d matrix product, so the reduction order is fixed.
 */
inline GradientCovariance estimate_gradient_covariance(const Region& region, std::span<const Vector> positives,
                                                       bool centered) {
  if (positives.empty()) throw Error(Errc::EmptyConditional, "no samples in C'");
  require(!centered || positives.size() >= 2, Errc::EmptyConditional, "centered covariance needs n >= 2");
  const auto n = static_cast<Eigen::Index>(positives.size());
  Matrix j(n, region.dim());
  for (Eigen::Index i = 0; i < n; ++i) j.row(i) = gradient_direction(region, positives[static_cast<std::size_t>(i)]).transpose();
  GradientCovariance cov;
  cov.n_samples = positives.size();
  cov.centered = centered;
  if (centered) {
    const Eigen::RowVectorXd mean = j.colwise().mean();
    j.rowwise() -= mean;
    cov.sigma = (j.transpose() * j) / static_cast<double>(n - 1);
  } else {
    cov.sigma = (j.transpose() * j) / static_cast<double>(n);
  }
  cov.sigma = (cov.sigma + cov.sigma.transpose()).eval() / 2.0;
  return cov;
}

inline GradientCovariance estimate_gradient_covariance(const Region& region, const Sampler& sampler, std::size_t n,
                                                       bool centered, Rng& rng) {
  const auto pts = sample_positive(region, sampler, n, rng);
  return estimate_gradient_covariance(region, pts, centered);
}

struct EigenSubspace {
  Subspace subspace;
  double s_k = 0.0;
  Vector eigenvalues;  // all eigenvalues, descending
};

/**
 * Top-k eigenvectors of the covariance. Each eigenvector's sign is fixed so
 * its largest-magnitude entry is positive. s_k is the sum of the k largest
 * eigenvalues, clamped to [0, 1] for uncentered matrices.
 */
inline EigenSubspace eigen_subspace(const GradientCovariance& cov, Eigen::Index k) {
  const Eigen::Index d = cov.sigma.rows();
  if (!(k >= 1 && k <= d)) {
    throw Error(Errc::InvalidDimension, "need 1 <= k <= d, got k=" + std::to_string(k));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov.sigma);
  if (eig.info() != Eigen::Success) throw Error(Errc::EigenFailure, "symmetric eigensolver did not converge");
  const Vector& lam = eig.eigenvalues();  // ascending
  const Matrix& vec = eig.eigenvectors();
  const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  Matrix top(d, k);
  Vector desc(d);
  for (Eigen::Index i = 0; i < d; ++i) desc[i] = lam[d - 1 - i];
  for (Eigen::Index i = 0; i < k; ++i) {
    Vector v = vec.col(d - 1 - i);
    const double residual = (cov.sigma * v - lam[d - 1 - i] * v).norm();
    if (residual > 1e-6 * scale) {
      throw Error(Errc::EigenFailure, "eigenpair residual " + std::to_string(residual) + " exceeds tolerance");
    }
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    top.col(i) = v;
  }
  double s_k = desc.head(k).sum();
  if (!cov.centered) s_k = std::clamp(s_k, 0.0, 1.0);
  return {orthonormalize(top), s_k, desc};
}

/// (1 - s_k)/(1 - alpha^2), valid for 0 < alpha < sqrt(s_k) <= 1.
inline double svd_viability_delta(double s_k, double alpha) {
  if (!(s_k > 0.0 && s_k <= 1.0 + 1e-12 && alpha > 0.0 && alpha < std::sqrt(std::min(s_k, 1.0)))) {
    throw Error(Errc::AlphaOutOfRange, "need 0 < alpha < sqrt(s_k) <= 1, got alpha=" + std::to_string(alpha) +
                                           " s_k=" + std::to_string(s_k));
  }
  return std::max(0.0, 1.0 - s_k) / (1.0 - alpha * alpha);
}

struct ViabilityParams {
  double alpha = 0.0;
  double delta = 1.0;
};

/// Random k-subspace of R^d: alpha = sqrt(k/d) - t, delta = min(1, 2 exp(-t^2 d / 2)).
inline ViabilityParams random_viability_params(Eigen::Index d, Eigen::Index k, double t) {
  require(d >= 1 && k >= 1 && k <= d, Errc::InvalidDimension, "need 1 <= k <= d");
  const double root = std::sqrt(static_cast<double>(k) / static_cast<double>(d));
  if (!(t > 0.0 && t < root)) {
    throw Error(Errc::TOutOfRange, "need 0 < t < sqrt(k/d) = " + std::to_string(root));
  }
  return {root - t, std::min(1.0, 2.0 * std::exp(-t * t * static_cast<double>(d) / 2.0))};
}

struct ViabilityEstimate {
  double alpha = 0.0;
  double delta_hat = 0.0;
  double std_err = 0.0;
  std::size_t n = 0;
};

inline double binomial_stderr(double p, std::size_t n) {
  return n == 0 ? 0.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

/// Fraction of C' samples whose projected gradient direction is shorter than alpha.
inline ViabilityEstimate estimate_viability(const Region& region, const Subspace& v,
                                            std::span<const Vector> positives, double alpha) {
  if (positives.empty()) throw Error(Errc::EmptyConditional, "no samples in C'");
  require(positives.size() >= 100, Errc::EmptySample, "viability estimation needs n >= 100");
  std::size_t misses = 0;
  for (const auto& x : positives) {
    if (projected_alignment(region, v, x) < alpha) ++misses;
  }
  ViabilityEstimate est;
  est.alpha = alpha;
  est.n = positives.size();
  est.delta_hat = static_cast<double>(misses) / static_cast<double>(est.n);
  est.std_err = binomial_stderr(est.delta_hat, est.n);
  return est;
}

inline ViabilityEstimate estimate_viability(const Region& region, const Subspace& v, const Sampler& sampler,
                                            std::size_t n, double alpha, Rng& rng) {
  const auto pts = sample_positive(region, sampler, n, rng);
  return estimate_viability(region, v, pts, alpha);
}

}  // namespace ldap
