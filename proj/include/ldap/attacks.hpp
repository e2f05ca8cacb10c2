#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ldap/parallel.hpp"
#include "ldap/regions.hpp"
#include "ldap/viability.hpp"

namespace ldap {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class StepRule { Fixed, Backtracking };

/**
 * Subspace-constrained attack settings. Step lengths are relative to the
 * budget eps: the first step is initial_step_rel * eps and backtracking stops
 * below min_step_rel * eps.
 */
struct AttackConfig {
  int max_iters = 200;
  StepRule step_rule = StepRule::Backtracking;
  double initial_step_rel = 0.25;
  double shrink = 0.5;
  double min_step_rel = 1e-4;
  double eps = 1.0;
  int line_grid = 11;
  bool use_exact = true;  // closed forms override the attack where available
};

inline void validate(const AttackConfig& cfg) {
  require(cfg.max_iters >= 1, Errc::BadShape, "attack max_iters must be >= 1");
  require(cfg.eps >= 0.0, Errc::BadShape, "attack budget must be >= 0");
  require(cfg.initial_step_rel > 0.0, Errc::BadShape, "initial step must be positive");
  require(cfg.shrink > 0.0 && cfg.shrink < 1.0, Errc::BadShape, "shrink must be in (0, 1)");
  require(cfg.min_step_rel > 0.0, Errc::BadShape, "min step must be positive");
  require(cfg.line_grid >= 2, Errc::BadShape, "line grid needs at least the two endpoints");
}

struct AttackResult {
  double distance = kInf;  // upper bound on d_V(x); infinity on failure
  bool zero_projected_gradient = false;
  int iterations = 0;
};

/// d_V for a half-space: (x^T w - b)_+ / ||Pi_V w||, infinity when V is orthogonal to w.
inline double exact_dV_halfspace(const HalfSpace& hs, const Subspace& v, const Vector& x) {
  const double f = hs.value(x);
  if (f <= 0.0) return 0.0;
  const double a = v.projection_norm(hs.normal());
  if (a < 1e-12) return kInf;
  return f / a;
}

/**
 * d_V for an inside-negative ball: with x = Pi_V x + x_perp, the segment
 * along -Pi_V x enters the ball after ||Pi_V x|| - sqrt(r^2 - ||x_perp||^2)
 * when ||x_perp|| <= r; otherwise no point of x + V meets the ball.
 */
inline double exact_dV_ball(const Ball& ball, const Subspace& v, const Vector& x) {
  require(ball.orientation() == BallOrientation::InsideNegative, Errc::BadShape,
          "closed-form d_V needs an inside-negative ball");
  if (ball.value(x) <= 0.0) return 0.0;
  const Vector xv = v.project(x);
  const double perp2 = (x - xv).squaredNorm();
  const double r2 = ball.radius() * ball.radius();
  if (perp2 > r2) return kInf;
  return std::max(0.0, xv.norm() - std::sqrt(r2 - perp2));
}

/// Closed-form d_V when the region admits one.
inline std::optional<double> exact_dV(const Region& region, const Subspace& v, const Vector& x) {
  if (const auto* hs = dynamic_cast<const HalfSpace*>(&region)) return exact_dV_halfspace(*hs, v, x);
  if (const auto* b = dynamic_cast<const Ball*>(&region)) {
    if (b->orientation() == BallOrientation::InsideNegative) return exact_dV_ball(*b, v, x);
  }
  return std::nullopt;
}

inline bool has_exact_dV(const Region& region) {
  if (dynamic_cast<const HalfSpace*>(&region)) return true;
  if (const auto* b = dynamic_cast<const Ball*>(&region)) return b->orientation() == BallOrientation::InsideNegative;
  return false;
}

/**
 * Projected-gradient descent inside V. Each step moves along
 * -Pi_V grad f / ||Pi_V grad f||; a step that lands in C is refined by
 * bisection to the crossing point. Backtracking accepts a step only under
 * the Armijo condition, so the path does not zigzag across a valley floor.
 * Returns ||x_hit - x0||, which bounds d_V(x) from above, or infinity once
 * the path budget, the iteration cap or the minimum step is exhausted.
 */
inline constexpr double kArmijo = 0.5;

inline AttackResult attack_dV_upper(const Region& region, const Subspace& v, const Vector& x0,
                                    const AttackConfig& cfg) {
  validate(cfg);
  AttackResult res;
  double fx = region.value(x0);
  if (fx <= 0.0) {
    res.distance = 0.0;
    return res;
  }
  if (cfg.eps <= 0.0) return res;

  Vector x = x0;
  double moved = 0.0;
  double step = cfg.initial_step_rel * cfg.eps;
  const double min_step = cfg.min_step_rel * cfg.eps;
  for (int it = 0; it < cfg.max_iters; ++it) {
    res.iterations = it + 1;
    const Vector g = v.project(region.gradient(x));
    const double gn = g.norm();
    if (gn < 1e-12) {
      res.zero_projected_gradient = true;
      return res;
    }
    const Vector dir = -g / gn;
    const double remaining = cfg.eps - moved;
    if (remaining <= 0.0) return res;
    const double s = std::min(step, remaining);
    const Vector xs = x + s * dir;
    const double fs = region.value(xs);
    if (fs <= 0.0) {
      double lo = 0.0, hi = s;
      for (int b = 0; b < 100 && hi - lo > 1e-13 * (1.0 + moved + hi); ++b) {
        const double mid = 0.5 * (lo + hi);
        if (region.value(x + mid * dir) <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      res.distance = (x + hi * dir - x0).norm();
      return res;
    }
    if (cfg.step_rule == StepRule::Fixed || fs <= fx - kArmijo * s * gn) {
      x = xs;
      fx = fs;
      moved += s;
    } else {
      step *= cfg.shrink;
      if (step < min_step) return res;
    }
  }
  return res;
}

/// Certified fooling-rate estimate on C'-conditioned samples.
struct FoolingEstimate {
  double fr_hat = 0.0;
  double std_err = 0.0;
  std::size_t n_positive = 0;
  double eps = 0.0;
  bool attack_based = false;
};

/// Per-sample d_V upper bounds with budget cfg.eps (closed forms when cfg.use_exact and available).
inline std::vector<double> along_subspace_distances(const Region& region, const Subspace& v,
                                                    std::span<const Vector> points, const AttackConfig& cfg) {
  validate(cfg);
  check_dim(v.dim_ambient(), region.dim(), "subspace");
  const bool exact = cfg.use_exact && has_exact_dV(region);
  std::vector<double> out(points.size(), kInf);
  parallel_for(points.size(), [&](std::size_t i) {
    out[i] = exact ? *exact_dV(region, v, points[i]) : attack_dV_upper(region, v, points[i], cfg).distance;
  });
  return out;
}

inline FoolingEstimate fooling_rate_from_distances(std::span<const double> dists, double eps, bool attack_based) {
  if (dists.empty()) throw Error(Errc::EmptyConditional, "no samples in C'");
  const auto hits = std::count_if(dists.begin(), dists.end(), [&](double d) { return d <= eps; });
  FoolingEstimate est;
  est.eps = eps;
  est.n_positive = dists.size();
  est.fr_hat = static_cast<double>(hits) / static_cast<double>(dists.size());
  est.std_err = binomial_stderr(est.fr_hat, est.n_positive);
  est.attack_based = attack_based;
  return est;
}

/**
 * FR(V; eps) estimated on n rejection-sampled points of C'. Uses closed forms
 * for half-spaces and balls; otherwise the attack, which makes the result a
 * lower estimate. eps = 0 gives 0 since all samples start in C'.
 */
inline FoolingEstimate fooling_rate(const Region& region, const Subspace& v, double eps, const Sampler& sampler,
                                    std::size_t n, AttackConfig cfg, Rng& rng, std::size_t max_attempts = 0) {
  require(n >= 1, Errc::EmptySample, "need n >= 1");
  require(eps >= 0.0, Errc::BadShape, "eps must be >= 0");
  const auto pts = sample_positive(region, sampler, n, rng, max_attempts);
  cfg.eps = eps;
  const auto d = along_subspace_distances(region, v, pts, cfg);
  return fooling_rate_from_distances(d, eps, !(cfg.use_exact && has_exact_dV(region)));
}

/// True when f(x + s v) <= 0 for some s on the symmetric grid over [-eps, eps].
inline bool uap_succeeds(const Region& region, const Vector& x, const Vector& v, double eps, int line_grid) {
  if (region.value(x) <= 0.0) return true;
  if (eps <= 0.0) return false;
  for (int j = 0; j < line_grid; ++j) {
    const double s = -eps + 2.0 * eps * static_cast<double>(j) / static_cast<double>(line_grid - 1);
    if (region.value(x + s * v) <= 0.0) return true;
  }
  return false;
}

inline FoolingEstimate uap_fooling_rate(const Region& region, const Vector& v, double eps,
                                        std::span<const Vector> points, const AttackConfig& cfg) {
  validate(cfg);
  if (points.empty()) throw Error(Errc::EmptyConditional, "no samples in C'");
  require(std::abs(v.norm() - 1.0) < 1e-9, Errc::BadShape, "UAP direction must be a unit vector");
  check_dim(v.size(), region.dim(), "UAP direction");
  std::vector<char> hit(points.size(), 0);
  parallel_for(points.size(), [&](std::size_t i) { hit[i] = uap_succeeds(region, points[i], v, eps, cfg.line_grid); });
  const auto hits = std::count(hit.begin(), hit.end(), 1);
  FoolingEstimate est;
  est.eps = eps;
  est.n_positive = points.size();
  est.fr_hat = static_cast<double>(hits) / static_cast<double>(points.size());
  est.std_err = binomial_stderr(est.fr_hat, est.n_positive);
  return est;
}

inline FoolingEstimate uap_fooling_rate(const Region& region, const Vector& v, double eps, const Sampler& sampler,
                                        std::size_t n, const AttackConfig& cfg, Rng& rng,
                                        std::size_t max_attempts = 0) {
  const auto pts = sample_positive(region, sampler, n, rng, max_attempts);
  return uap_fooling_rate(region, v, eps, pts, cfg);
}

}  // namespace ldap
