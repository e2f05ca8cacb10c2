#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ldap/regions.hpp"

namespace ldap {

/// Margin and gradient norm at one C'-conditioned draw.
struct MarginSample {
  double margin = 0.0;
  double grad_norm = 0.0;
};

/// Regularity parameters a bound may consume. NaN means "not estimated".
struct ConditionParams {
  double alpha = 1.0;
  double delta = 0.0;
  double beta = std::nan("");
  double gamma = std::nan("");
  double L = std::nan("");
  double theta = std::nan("");
  double R = std::nan("");
};

struct ConditionConfig {
  double beta_quantile = 0.05;
  double theta_quantile = 0.99;
  std::size_t n_pairs = 10000;
  double R = 1.0;
};

struct ConditionEstimate {
  double beta = 0.0;
  double gamma = 0.0;
  double theta = 0.0;
  double R = 0.0;
  double L = 0.0;
  bool L_analytic = false;
  std::size_t pairs_used = 0;
};

/// Lower empirical quantile: the value at rank floor(q (n-1)) of the sorted sample.
inline double lower_quantile(std::vector<double> values, double q) {
  require(!values.empty(), Errc::EmptySample, "quantile of an empty sample");
  q = std::clamp(q, 0.0, 1.0);
  const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
  return values[idx];
}

inline std::vector<MarginSample> margin_samples(const Region& region, std::span<const Vector> points) {
  std::vector<MarginSample> out;
  out.reserve(points.size());
  for (const auto& x : points) {
    const double f = region.value(x);
    const double g = region.gradient(x).norm();
    if (f > 0.0 && g < 1e-12) throw Error(Errc::ZeroGradient, "vanishing gradient at a point of C'");
    out.push_back({f > 0.0 ? f / g : 0.0, g});
  }
  return out;
}

/**
 * Empirical Conditions on C'-conditioned points.
 *
 * beta is the configured lower quantile of ||grad f||, gamma the fraction of
 * points strictly below it. theta is the configured upper quantile of
 * ||grad f(x') - grad f(x)|| over pairs x' = x + R u (u uniform on the
 * sphere) with x' also in C'. L is the region's analytic bound when it has
 * one, otherwise the same upper quantile of the difference ratio.
 */
inline ConditionEstimate estimate_conditions(const Region& region, std::span<const Vector> positives,
                                             const ConditionConfig& cfg, Rng& rng) {
  if (positives.empty()) throw Error(Errc::EmptyConditional, "no samples in C'");
  require(cfg.R > 0.0, Errc::BadShape, "R must be positive");
  std::vector<Vector> grads;
  grads.reserve(positives.size());
  std::vector<double> norms;
  norms.reserve(positives.size());
  for (const auto& x : positives) {
    grads.push_back(region.gradient(x));
    norms.push_back(grads.back().norm());
  }

  ConditionEstimate est;
  est.R = cfg.R;
  est.beta = lower_quantile(norms, cfg.beta_quantile);
  const auto below = std::count_if(norms.begin(), norms.end(), [&](double g) { return g < est.beta; });
  est.gamma = static_cast<double>(below) / static_cast<double>(norms.size());

  std::vector<double> diffs;
  diffs.reserve(cfg.n_pairs);
  for (std::size_t i = 0; i < cfg.n_pairs; ++i) {
    const std::size_t j = i % positives.size();
    const Vector xp = positives[j] + cfg.R * random_unit_vector(region.dim(), rng);
    if (region.value(xp) <= 0.0) continue;
    diffs.push_back((region.gradient(xp) - grads[j]).norm());
  }
  est.pairs_used = diffs.size();
  est.theta = diffs.empty() ? 0.0 : lower_quantile(diffs, cfg.theta_quantile);

  if (auto l = region.lipschitz_bound()) {
    est.L = *l;
    est.L_analytic = true;
  } else {
    est.L = est.theta / cfg.R;
  }
  return est;
}

inline ConditionEstimate estimate_conditions(const Region& region, const Sampler& sampler, std::size_t n,
                                             const ConditionConfig& cfg, Rng& rng) {
  require(n >= 100, Errc::EmptySample, "condition estimation needs n >= 100");
  const auto pts = sample_positive(region, sampler, n, rng);
  return estimate_conditions(region, pts, cfg, rng);
}

}  // namespace ldap
