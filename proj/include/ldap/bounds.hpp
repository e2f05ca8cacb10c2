#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "ldap/conditions.hpp"
#include "ldap/regions.hpp"
#include "ldap/viability.hpp"

namespace ldap {

// ---------------------------------------------------------------------------
// Standard normal

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Inverse of std_normal_cdf: Acklam's rational approximation plus one Halley step.
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(Errc::POutOfRange, "quantile needs p in (0, 1), got " + std::to_string(p));
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against erfc; the residual is taken on the smaller tail.
  const double e = (p < 0.5) ? std_normal_cdf(x) - p : (1.0 - p) - std_normal_cdf(-x);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

// ---------------------------------------------------------------------------
// Margin-based bounds. All probabilities are empirical over C'-conditioned
// samples, and every value is clamped to [0, 1].

namespace detail {
inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

template <typename Pred>
double fraction(std::span<const MarginSample> s, Pred&& pred) {
  if (s.empty()) throw Error(Errc::EmptySample, "bound evaluated on an empty sample");
  const auto hits = std::count_if(s.begin(), s.end(), pred);
  return static_cast<double>(hits) / static_cast<double>(s.size());
}
}  // namespace detail

/// P(f(X) <= beta eps | C'), with f = margin * ||grad f||.
inline double bound_strongslope(std::span<const MarginSample> s, double beta, double eps) {
  require(eps >= 0.0, Errc::BadShape, "eps must be >= 0");
  return detail::clamp01(detail::fraction(s, [&](const MarginSample& m) { return m.margin * m.grad_norm <= beta * eps; }));
}

/**
 * P(m <= min(alpha eps/2, alpha^2 ||grad f||/(2L)) | C') - delta.
 * L = 0 is accepted as the limit in which the second term is infinite.
 */
inline double bound_smooth_A(std::span<const MarginSample> s, double alpha, double delta, double L, double eps) {
  require(eps >= 0.0, Errc::BadShape, "eps must be >= 0");
  require(L >= 0.0, Errc::BadShape, "L must be >= 0");
  const double p = detail::fraction(s, [&](const MarginSample& m) {
    const double curv = L > 0.0 ? alpha * alpha * m.grad_norm / (2.0 * L) : std::numeric_limits<double>::infinity();
    return m.margin <= std::min(alpha * eps / 2.0, curv);
  });
  return detail::clamp01(p - delta);
}

/// Upper end of the eps window for bound_smooth_B: alpha beta / L (infinite when L = 0).
inline double smooth_B_window(double alpha, double beta, double L) {
  return L > 0.0 ? alpha * beta / L : std::numeric_limits<double>::infinity();
}

/// P(m <= alpha eps/2 | C') - delta - gamma, valid for 0 <= eps <= alpha beta / L.
inline double bound_smooth_B(std::span<const MarginSample> s, double alpha, double delta, double beta, double gamma,
                             double L, double eps) {
  require(eps >= 0.0, Errc::BadShape, "eps must be >= 0");
  const double window = smooth_B_window(alpha, beta, L);
  if (eps > window) {
    throw Error(Errc::EpsOutOfValidityWindow,
                "eps=" + std::to_string(eps) + " exceeds alpha*beta/L=" + std::to_string(window));
  }
  const double p = detail::fraction(s, [&](const MarginSample& m) { return m.margin <= alpha * eps / 2.0; });
  return detail::clamp01(p - delta - gamma);
}

/// Convex f: FR(V; eps) <= P(m <= alpha_tilde eps | C').
inline double bound_upper_convex(std::span<const MarginSample> s, double alpha_tilde, double eps) {
  require(eps >= 0.0, Errc::BadShape, "eps must be >= 0");
  require(alpha_tilde >= 0.0 && alpha_tilde <= 1.0, Errc::AlphaOutOfRange, "alpha_tilde must lie in [0, 1]");
  return detail::clamp01(detail::fraction(s, [&](const MarginSample& m) { return m.margin <= alpha_tilde * eps; }));
}

/**
 * Margin multiplier for the bounded-oscillation bound. Along v(x) the
 * projected slope is at least alpha ||grad f|| - theta, so d_V(x) <= eps once
 * m(x) <= (alpha - theta/beta) eps = alpha (1 - theta/(alpha beta)) eps.
 */
inline double almost_const_multiplier(double alpha, double beta, double theta) { return alpha - theta / beta; }

/// P(m <= (alpha - theta/beta) eps | C', ||grad f|| >= beta) - delta - gamma, for 0 <= eps <= R.
inline double bound_almost_const(std::span<const MarginSample> s, double alpha, double delta, double beta,
                                 double gamma, double theta, double R, double eps) {
  require(eps >= 0.0, Errc::BadShape, "eps must be >= 0");
  require(beta > 0.0, Errc::BadShape, "beta must be > 0");
  if (!(alpha > theta / beta)) {
    throw Error(Errc::AlphaTooSmall, "need alpha > theta/beta, got alpha=" + std::to_string(alpha) +
                                         " theta/beta=" + std::to_string(theta / beta));
  }
  if (eps > R) throw Error(Errc::EpsExceedsR, "eps=" + std::to_string(eps) + " exceeds R=" + std::to_string(R));
  if (s.empty()) throw Error(Errc::EmptySample, "bound evaluated on an empty sample");
  const double mult = almost_const_multiplier(alpha, beta, theta);
  std::size_t strong = 0, hits = 0;
  for (const auto& m : s) {
    if (m.grad_norm < beta) continue;
    ++strong;
    if (m.margin <= mult * eps) ++hits;
  }
  if (strong == 0) throw Error(Errc::EmptySample, "no sample has ||grad f|| >= beta");
  return detail::clamp01(static_cast<double>(hits) / static_cast<double>(strong) - delta - gamma);
}

// ---------------------------------------------------------------------------
// Compact regions

/**
 * Ball-case lower bound on the fooling rate of a single direction:
 *   1                                          eps >= 2
 *   1 - exp(-eps^2 (d-1)/8) / (eps sqrt(d))    sqrt(8/d) <= eps < 2
 *   1 - exp(-eps^2 d/8)                        0 <= eps < sqrt(8/d)
 */
inline double g_d(double d, double eps) {
  require(d >= 1.0, Errc::InvalidDimension, "g_d needs d >= 1");
  require(eps >= 0.0, Errc::BadShape, "eps must be >= 0");
  if (eps >= 2.0) return 1.0;
  if (eps >= std::sqrt(8.0 / d)) {
    return detail::clamp01(1.0 - std::exp(-eps * eps * (d - 1.0) / 8.0) / (eps * std::sqrt(d)));
  }
  return detail::clamp01(1.0 - std::exp(-eps * eps * d / 8.0));
}

/// log of the unit-ball volume pi^{d/2} / Gamma(d/2 + 1).
inline double log_unit_ball_volume(double d) {
  return 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0);
}

/// Radius of the ball with the given log-volume.
inline double iso_volumetric_radius_from_log(double log_volume, double d) {
  require(d >= 1.0, Errc::InvalidDimension, "d must be >= 1");
  if (log_volume == -std::numeric_limits<double>::infinity()) return 0.0;
  if (log_volume == std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
  return std::exp((log_volume - log_unit_ball_volume(d)) / d);
}

inline double iso_volumetric_radius(double volume, double d) {
  require(volume >= 0.0, Errc::BadShape, "volume must be >= 0");
  return iso_volumetric_radius_from_log(volume == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(volume), d);
}

/// g_d(eps / (2 R(C'))) for compact C' with iso-volumetric radius R(C').
inline double bound_compact(double d, double eps, double iso_radius) {
  require(iso_radius > 0.0, Errc::BadShape, "iso-volumetric radius must be positive");
  return g_d(d, eps / (2.0 * iso_radius));
}

// ---------------------------------------------------------------------------
// Envelope identities used by the smooth-boundary arguments

/// sup_{|z| <= rho} b z - z^2/(2r): Huber function of |b|.
inline double huber_envelope(double b_norm, double rho, double r) {
  require(rho > 0.0 && r > 0.0 && b_norm >= 0.0, Errc::BadShape, "need rho > 0, r > 0, |b| >= 0");
  if (b_norm <= rho / r) return r * b_norm * b_norm / 2.0;
  return rho * b_norm - rho * rho / (2.0 * r);
}

/// sup_{|z| <= rho} b z - |z|/r = rho (|b| - 1/r)_+.
inline double soft_threshold_sup(double b_norm, double rho, double r) {
  require(rho > 0.0 && r > 0.0, Errc::BadShape, "need rho > 0, r > 0");
  return rho * std::max(0.0, b_norm - 1.0 / r);
}

// ---------------------------------------------------------------------------
// Polytopes and Gaussian isoperimetry

/// min_i ||Pi_V w_i|| over the facet normals.
inline double alpha_V_polytope(const Polytope& poly, const Subspace& v) {
  check_dim(v.dim_ambient(), poly.dim(), "subspace");
  double best = 1.0;
  for (Eigen::Index i = 0; i < poly.facets(); ++i) {
    best = std::min(best, v.projection_norm(poly.normals().row(i).transpose()));
  }
  return std::clamp(best, 0.0, 1.0);
}

/**
 * Gaussian isoperimetric expansion Phi(Phi^{-1}(p) + alpha_V eps / sigma):
 * the least N(0, sigma^2 I) mass of a set of mass p expanded by alpha_V eps.
 * Attained by half-spaces.
 */
inline double gaussian_expansion_bound(double p, double alpha_V, double eps, double sigma) {
  if (!(p > 0.0 && p < 1.0)) throw Error(Errc::POutOfRange, "need p in (0, 1), got " + std::to_string(p));
  require(sigma > 0.0, Errc::BadShape, "sigma must be > 0");
  require(eps >= 0.0, Errc::BadShape, "eps must be >= 0");
  require(alpha_V >= 0.0 && alpha_V <= 1.0, Errc::AlphaOutOfRange, "alpha_V must lie in [0, 1]");
  if (eps == 0.0 || alpha_V == 0.0) return p;
  return std_normal_cdf(std_normal_quantile(p) + alpha_V * eps / sigma);
}

struct RandomPolytopeBound {
  double value = 0.0;
  double prob_over_V = 0.0;  // probability over V that the bound applies; reported, not multiplied in
};

inline RandomPolytopeBound random_polytope_bound(Eigen::Index d, Eigen::Index k, double t, Eigen::Index n_facets,
                                                 double p, double eps, double sigma) {
  require(n_facets >= 1, Errc::BadShape, "need N >= 1");
  const auto vp = random_viability_params(d, k, t);
  RandomPolytopeBound out;
  out.value = gaussian_expansion_bound(p, vp.alpha, eps, sigma);
  out.prob_over_V = std::max(0.0, 1.0 - std::exp(-t * t * static_cast<double>(d) / 2.0));
  return out;
}

/// Exact fooling rate of a half-space {x^T w <= b} under N(0, sigma^2 I) for an attack with alignment alpha.
inline double halfspace_gaussian_fooling_rate(double alpha, double eps, double b, double sigma) {
  const double lo = std_normal_cdf(b / sigma);
  const double hi = std_normal_cdf((b + alpha * eps) / sigma);
  const double denom = 1.0 - lo;
  require(denom > 0.0, Errc::EmptyConditional, "half-space positive region has zero Gaussian mass");
  return detail::clamp01((hi - lo) / denom);
}

// ---------------------------------------------------------------------------
// Translate-overlap functional for compact bodies

/// A bounded body given by a membership test and a bounding box; optionally a direct uniform sampler.
struct Body {
  Eigen::Index dim = 0;
  std::function<bool(const Vector&)> contains;
  Vector box_lo;
  Vector box_hi;
  std::function<Vector(Rng&)> sample_uniform;  // optional
};

inline Body ball_body(Eigen::Index d, double r) {
  Body b;
  b.dim = d;
  b.contains = [r](const Vector& x) { return x.squaredNorm() <= r * r; };
  b.box_lo = Vector::Constant(d, -r);
  b.box_hi = Vector::Constant(d, r);
  b.sample_uniform = [d, r](Rng& rng) { return UniformBallSampler(d, r).draw(rng); };
  return b;
}

inline Body cube_body(Eigen::Index d, double half_width) {
  Body b;
  b.dim = d;
  b.contains = [half_width](const Vector& x) { return x.cwiseAbs().maxCoeff() <= half_width; };
  b.box_lo = Vector::Constant(d, -half_width);
  b.box_hi = Vector::Constant(d, half_width);
  return b;
}

struct TauEstimate {
  double tau = 0.0;
  double std_err = 0.0;
};

/**
 * Monte-Carlo estimate of E_v[vol(K ∩ (eps v + K)) / vol(K)] with v uniform
 * on the unit sphere, or in the unit ball. Balls maximize the ball average;
 * the sphere average can favour elongated bodies at large eps. Each direction gets n_vol fresh draws (from the direct
 * sampler if present, else uniform on the bounding box with rejection); the
 * standard error is the spread of the per-direction ratios.
 */
enum class TauDirections { Sphere, Ball };

inline TauEstimate tau_overlap_mc(const Body& body, double eps, std::size_t n_dirs, std::size_t n_vol, Rng& rng,
                                  TauDirections dirs = TauDirections::Sphere) {
  require(body.dim >= 1 && body.contains, Errc::BadShape, "body needs a dimension and a membership test");
  require(n_dirs >= 1 && n_vol >= 1, Errc::EmptySample, "need n_dirs >= 1 and n_vol >= 1");
  require(eps >= 0.0, Errc::BadShape, "eps must be >= 0");
  std::vector<double> per_dir;
  per_dir.reserve(n_dirs);
  std::size_t total_in = 0;
  for (std::size_t j = 0; j < n_dirs; ++j) {
    const Vector v =
        dirs == TauDirections::Ball ? UniformBallSampler(body.dim, 1.0).draw(rng) : random_unit_vector(body.dim, rng);
    std::size_t in = 0, hits = 0;
    for (std::size_t i = 0; i < n_vol; ++i) {
      Vector x;
      if (body.sample_uniform) {
        x = body.sample_uniform(rng);
      } else {
        x.resize(body.dim);
        for (Eigen::Index c = 0; c < body.dim; ++c) x[c] = rng.uniform(body.box_lo[c], body.box_hi[c]);
        if (!body.contains(x)) continue;
      }
      ++in;
      if (eps == 0.0 || body.contains(x - eps * v)) ++hits;
    }
    if (in == 0) throw Error(Errc::DegenerateVolume, "no volume sample landed in the body");
    total_in += in;
    per_dir.push_back(static_cast<double>(hits) / static_cast<double>(in));
  }
  TauEstimate est;
  double mean = 0.0;
  for (double t : per_dir) mean += t;
  mean /= static_cast<double>(per_dir.size());
  est.tau = mean;
  if (per_dir.size() >= 2) {
    double ss = 0.0;
    for (double t : per_dir) ss += (t - mean) * (t - mean);
    est.std_err = std::sqrt(ss / static_cast<double>(per_dir.size() - 1) / static_cast<double>(per_dir.size()));
  } else {
    est.std_err = binomial_stderr(mean, total_in);
  }
  return est;
}

}  // namespace ldap
