#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ldap/attacks.hpp"
#include "ldap/bounds.hpp"
#include "ldap/conditions.hpp"
#include "ldap/config.hpp"
#include "ldap/report.hpp"
#include "ldap/viability.hpp"

namespace ldap {

struct RunControl {
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(const std::string&)> log;

  bool cancelled() const { return cancel != nullptr && cancel->load(); }
  void note(const std::string& s) const {
    if (log) log(s);
  }
};

struct ViabilityRow {
  long long k = 0;
  double alpha = 0.0;
  double delta_bound = 0.0;
  double delta_hat = 0.0;
  double std_err = 0.0;
};

/// Gradient-direction spectrum for one repeat of an eigen-subspace run.
struct SpectrumReport {
  std::uint64_t seed = 0;
  bool centered = true;
  Vector eigenvalues;  // descending, of the configured covariance
  double trace = 0.0;
  std::vector<std::pair<long long, double>> s_k;         // configured covariance
  std::vector<std::pair<long long, double>> captured;    // E||Pi_V eta||^2, uncentered
  std::vector<ViabilityRow> viability;
  bool s_k_out_of_range = false;  // centered s_k outside [0, 1]
};

struct ExperimentResult {
  std::vector<FoolingCurve> curves;
  std::vector<SpectrumReport> spectra;
  std::size_t flagged_rows = 0;
  std::size_t errors = 0;
  bool cancelled = false;
};

namespace detail {

inline std::vector<BoundColumn> bound_columns(const ExperimentConfig& cfg) {
  std::vector<BoundColumn> cols;
  for (const auto& b : cfg.bounds) cols.push_back({b.name, b.role});
  return cols;
}

inline FoolingCurve error_curve(const ExperimentConfig& cfg, std::uint64_t seed, long long k, const std::string& msg) {
  FoolingCurve c;
  c.experiment_id = cfg.experiment_id;
  c.region = cfg.region.kind;
  c.k = k;
  c.seed = seed;
  c.bounds = bound_columns(cfg);
  for (double e : cfg.eps) {
    CurveRow row;
    row.eps = e;
    row.fr_hat = std::nan("");
    row.std_err = std::nan("");
    row.bounds.assign(c.bounds.size(), std::nan(""));
    row.flag = "error: " + msg;
    c.rows.push_back(std::move(row));
  }
  return c;
}

/// Seed of repeat r; also the value written to the seed column.
inline std::uint64_t repeat_seed(const ExperimentConfig& cfg, int r) {
  return r == 0 ? cfg.seed : splitmix64(cfg.seed + static_cast<std::uint64_t>(r));
}

// Independent streams of one repeat. Conditions and covariances are
// estimated on the held-out stream, fooling rates on the evaluation stream.
struct Streams {
  Rng region, data, heldout, eval, subspace, pairs;
  explicit Streams(std::uint64_t seed)
      : region(Rng(seed).split(0)),
        data(Rng(seed).split(1)),
        heldout(Rng(seed).split(2)),
        eval(Rng(seed).split(3)),
        subspace(Rng(seed).split(4)),
        pairs(Rng(seed).split(5)) {}
};

/// Fraction of raw draws landing in C, with its binomial error.
inline std::pair<double, double> negative_mass(const Region& region, const Sampler& sampler, std::size_t n, Rng& rng) {
  std::size_t in = 0;
  for (std::size_t i = 0; i < n; ++i) in += region.value(sampler.draw(rng)) <= 0.0;
  const double p = static_cast<double>(in) / static_cast<double>(n);
  return {p, binomial_stderr(p, n)};
}

// Everything a subspace-scheme bound needs besides (alpha, delta) and eps.
struct BoundInputs {
  const Region* region = nullptr;
  const ExperimentConfig* cfg = nullptr;
  std::vector<MarginSample> margins;
  ConditionEstimate cond;
  std::size_t n_heldout = 0;
  double p_neg = std::nan("");
  double p_neg_se = 0.0;
};

struct BoundValue {
  double value = std::nan("");
  double se = 0.0;
};

inline double fraction_of(const std::vector<MarginSample>& s, double threshold) {
  const auto hits = std::count_if(s.begin(), s.end(), [&](const MarginSample& m) { return m.margin <= threshold; });
  return static_cast<double>(hits) / static_cast<double>(s.size());
}

/**
 * One subspace-scheme bound at eps. NaN when the bound does not apply
 * (outside its validity window, unmet precondition, wrong region kind).
 */
inline BoundValue subspace_bound(const std::string& name, const BoundInputs& in, const Subspace& v, double alpha,
                                 double delta, double eps) {
  const auto& m = in.margins;
  const auto& c = in.cond;
  const auto* hs = dynamic_cast<const HalfSpace*>(in.region);
  BoundValue out;
  try {
    if (name == "strongslope") {
      if (v.dim_sub() != v.dim_ambient()) return out;
      out.value = bound_strongslope(m, c.beta, eps);
      out.se = binomial_stderr(out.value, in.n_heldout);
    } else if (name == "smooth-A") {
      out.value = bound_smooth_A(m, alpha, delta, c.L, eps);
      const double p = std::min(1.0, out.value + delta);
      out.se = binomial_stderr(p, in.n_heldout);
    } else if (name == "smooth-B") {
      if (eps > smooth_B_window(alpha, c.beta, c.L)) return out;
      out.value = bound_smooth_B(m, alpha, delta, c.beta, c.gamma, c.L, eps);
      out.se = binomial_stderr(fraction_of(m, alpha * eps / 2.0), in.n_heldout);
    } else if (name == "upper-convex") {
      if (!in.region->is_convex()) return out;
      const double at = hs ? v.projection_norm(hs->normal()) : 1.0;
      out.value = bound_upper_convex(m, at, eps);
      out.se = binomial_stderr(out.value, in.n_heldout);
    } else if (name == "almost-const") {
      if (!(c.beta > 0.0) || !(alpha > c.theta / c.beta) || eps > c.R) return out;
      out.value = bound_almost_const(m, alpha, delta, c.beta, c.gamma, c.theta, c.R, eps);
      out.se = binomial_stderr(std::min(1.0, out.value + delta + c.gamma), in.n_heldout);
    } else if (name == "halfspace-exact") {
      if (!hs || in.cfg->data.kind != "gaussian") return out;
      out.value = halfspace_gaussian_fooling_rate(v.projection_norm(hs->normal()), eps, hs->offset(), in.cfg->data.sigma);
    } else if (name == "gaussian-expansion") {
      if (in.cfg->data.kind != "gaussian" || !(in.p_neg > 0.0 && in.p_neg < 1.0)) return out;
      double av;
      if (hs) {
        av = v.projection_norm(hs->normal());
      } else if (const auto* poly = dynamic_cast<const Polytope*>(in.region)) {
        av = alpha_V_polytope(*poly, v);
      } else {
        return out;
      }
      // Lower bound on P(X in C_V^eps), turned into a conditional rate on C'.
      auto as_fr = [&](double p) {
        const double g = gaussian_expansion_bound(p, av, eps, in.cfg->data.sigma);
        return std::clamp((g - p) / (1.0 - p), 0.0, 1.0);
      };
      out.value = as_fr(in.p_neg);
      const double lo = std::clamp(in.p_neg - in.p_neg_se, 1e-12, 1.0 - 1e-12);
      const double hi = std::clamp(in.p_neg + in.p_neg_se, 1e-12, 1.0 - 1e-12);
      out.se = std::abs(as_fr(hi) - as_fr(lo)) / 2.0;
    }
  } catch (const Error&) {
    out = {};
  }
  return out;
}

inline double bound_sum(const std::string& name, const BoundInputs& in, const Subspace& v, double alpha, double delta,
                        const std::vector<double>& eps) {
  double s = 0.0;
  for (double e : eps) {
    const double b = subspace_bound(name, in, v, alpha, delta, e).value;
    if (!std::isnan(b)) s += b;
  }
  return s;
}

/// The bound used to pick the free viability parameter: the first configured one that depends on it.
inline std::string driver_bound(const ExperimentConfig& cfg) {
  for (const auto& b : cfg.bounds) {
    if (b.name == "almost-const" || b.name == "smooth-A" || b.name == "smooth-B") return b.name;
  }
  return "";
}

inline FoolingCurve subspace_curve(const ExperimentConfig& cfg, std::uint64_t seed, long long k, const BoundInputs& in,
                                   const Subspace& v, const std::vector<double>& dists, bool attack_based, double alpha,
                                   double delta, double t) {
  FoolingCurve curve;
  curve.experiment_id = cfg.experiment_id;
  curve.region = cfg.region.kind;
  curve.k = k;
  curve.seed = seed;
  curve.bounds = bound_columns(cfg);
  for (double e : cfg.eps) {
    const auto fr = fooling_rate_from_distances(dists, e, attack_based);
    CurveRow row;
    row.eps = e;
    row.fr_hat = fr.fr_hat;
    row.std_err = fr.std_err;
    for (const auto& b : cfg.bounds) {
      const auto bv = subspace_bound(b.name, in, v, alpha, delta, e);
      row.bounds.push_back(bv.value);
      row.bound_se.push_back(bv.se);
    }
    row.alpha = alpha;
    row.delta = delta;
    row.beta = in.cond.beta;
    row.gamma = in.cond.gamma;
    row.theta = in.cond.theta;
    row.L = in.cond.L;
    row.R = in.cond.R;
    row.t = t;
    curve.rows.push_back(std::move(row));
  }
  return curve;
}

struct PreparedRepeat {
  std::unique_ptr<Region> region;
  std::vector<Vector> eval_points;
  std::vector<Vector> heldout_points;
  BoundInputs inputs;
};

inline PreparedRepeat prepare_repeat(const ExperimentConfig& cfg, const Sampler& sampler, Streams& st) {
  PreparedRepeat p;
  p.region = build_region(cfg, st.region, sampler, st.data);
  p.heldout_points = sample_positive(*p.region, sampler, cfg.heldout(), st.heldout);
  p.eval_points = sample_positive(*p.region, sampler, cfg.n_samples, st.eval);
  p.inputs.region = p.region.get();
  p.inputs.cfg = &cfg;
  p.inputs.margins = margin_samples(*p.region, p.heldout_points);
  p.inputs.cond = estimate_conditions(*p.region, p.heldout_points, cfg.conditions, st.pairs);
  p.inputs.n_heldout = p.heldout_points.size();
  const bool needs_mass =
      std::any_of(cfg.bounds.begin(), cfg.bounds.end(), [](const BoundSpec& b) { return b.name == "gaussian-expansion"; });
  if (needs_mass) std::tie(p.inputs.p_neg, p.inputs.p_neg_se) = negative_mass(*p.region, sampler, cfg.heldout(), st.heldout);
  return p;
}

inline AttackConfig attack_for(const ExperimentConfig& cfg) {
  AttackConfig a = cfg.attack;
  a.eps = cfg.eps.back();
  return a;
}

inline void finish(ExperimentResult& res) {
  res.flagged_rows = 0;
  for (auto& c : res.curves) res.flagged_rows += flag_violations(c);
}

}  // namespace detail

/**
 * Random (or fixed) subspace runs: for each repeat and each k, sample V,
 * take conditions from the held-out split, and evaluate FR and the selected
 * bounds over the eps grid. For the random scheme (alpha, delta) come from
 * the random-subspace concentration bound with t picked from the grid
 * t_i = i/(t_grid+1) sqrt(k/d) to maximise the first alpha-dependent bound.
 * For a fixed basis alpha is the 5% quantile of ||Pi_V eta|| on held-out data
 * and delta its empirical miss rate.
 */
inline ExperimentResult run_random_subspace_experiment(const ExperimentConfig& cfg, const RunControl& ctl = {}) {
  require(cfg.subspace.scheme == "random" || cfg.subspace.scheme == "fixed", Errc::ConfigError,
          "random-subspace runner needs the random or fixed scheme");
  ExperimentResult res;
  const auto sampler = build_sampler(cfg);
  const auto attack = detail::attack_for(cfg);
  std::optional<Subspace> fixed;
  std::vector<long long> ks = cfg.subspace.ks;
  if (cfg.subspace.scheme == "fixed") {
    fixed = load_basis(cfg.resolve(cfg.subspace.basis_file), cfg.d);
    ks = {fixed->dim_sub()};
  }
  for (int r = 0; r < cfg.n_repeats; ++r) {
    const std::uint64_t seed = detail::repeat_seed(cfg, r);
    detail::Streams st(seed);
    detail::PreparedRepeat prep;
    try {
      prep = detail::prepare_repeat(cfg, *sampler, st);
    } catch (const Error& e) {
      for (auto k : ks) res.curves.push_back(detail::error_curve(cfg, seed, k, e.what()));
      ++res.errors;
      continue;
    }
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      if (ctl.cancelled()) {
        res.cancelled = true;
        detail::finish(res);
        return res;
      }
      const long long k = ks[ki];
      try {
        Rng vrng = st.subspace.split(ki);
        const Subspace v = fixed ? *fixed : sample_random_subspace(cfg.d, k, vrng);
        const auto dists = along_subspace_distances(*prep.region, v, prep.eval_points, attack);
        const bool attack_based = !(attack.use_exact && has_exact_dV(*prep.region));
        double alpha = 1.0, delta = 0.0, t = std::nan("");
        if (k == cfg.d && !fixed) {
          t = 0.0;
        } else if (fixed) {
          std::vector<double> al;
          for (const auto& x : prep.heldout_points) al.push_back(projected_alignment(*prep.region, v, x));
          alpha = std::max(lower_quantile(al, 0.05), 1e-12);
          delta = estimate_viability(*prep.region, v, prep.heldout_points, alpha).delta_hat;
        } else {
          const std::string driver = detail::driver_bound(cfg);
          const double root = std::sqrt(static_cast<double>(k) / static_cast<double>(cfg.d));
          double best = -1.0;
          for (int i = 1; i <= cfg.subspace.t_grid; ++i) {
            const double ti = root * i / static_cast<double>(cfg.subspace.t_grid + 1);
            const auto vp = random_viability_params(cfg.d, k, ti);
            const double s = driver.empty() ? 0.0 : detail::bound_sum(driver, prep.inputs, v, vp.alpha, vp.delta, cfg.eps);
            if (s > best) {
              best = s;
              alpha = vp.alpha;
              delta = vp.delta;
              t = ti;
            }
          }
        }
        res.curves.push_back(detail::subspace_curve(cfg, seed, k, prep.inputs, v, dists, attack_based, alpha, delta, t));
        ctl.note("seed " + std::to_string(seed) + " k=" + std::to_string(k) + " done");
      } catch (const Error& e) {
        res.curves.push_back(detail::error_curve(cfg, seed, k, e.what()));
        ++res.errors;
      }
    }
  }
  detail::finish(res);
  return res;
}

/**
 * Eigen-subspace runs: estimate the gradient-direction covariance on the
 * held-out split, take its top-k eigenvectors as V and evaluate FR and
 * bounds. Viability uses (alpha, (1 - s)/(1 - alpha^2)) with
 * s = E||Pi_V eta||^2 measured on the uncentered covariance, which equals
 * s_k when V comes from the uncentered matrix; alpha is chosen from the
 * configured grid. The spectrum report lists eigenvalues, s_k and, for every
 * admissible alpha, the predicted and measured miss rates.
 */
inline ExperimentResult run_eigen_subspace_experiment(const ExperimentConfig& cfg, const RunControl& ctl = {}) {
  require(cfg.subspace.scheme == "eigen", Errc::ConfigError, "eigen runner needs the eigen scheme");
  ExperimentResult res;
  const auto sampler = build_sampler(cfg);
  const auto attack = detail::attack_for(cfg);
  for (int r = 0; r < cfg.n_repeats; ++r) {
    const std::uint64_t seed = detail::repeat_seed(cfg, r);
    detail::Streams st(seed);
    detail::PreparedRepeat prep;
    GradientCovariance cov, uncentered;
    try {
      prep = detail::prepare_repeat(cfg, *sampler, st);
      Rng grad_rng = st.heldout.split(99);
      const auto grad_pts = sample_positive(*prep.region, *sampler, cfg.subspace.n_grad, grad_rng);
      cov = estimate_gradient_covariance(*prep.region, grad_pts, cfg.subspace.centered);
      uncentered = cfg.subspace.centered ? estimate_gradient_covariance(*prep.region, grad_pts, false) : cov;
    } catch (const Error& e) {
      for (auto k : cfg.subspace.ks) res.curves.push_back(detail::error_curve(cfg, seed, k, e.what()));
      ++res.errors;
      continue;
    }
    SpectrumReport spec;
    spec.seed = seed;
    spec.centered = cov.centered;
    spec.trace = cov.sigma.trace();
    for (const long long k : cfg.subspace.ks) {
      if (ctl.cancelled()) {
        res.cancelled = true;
        res.spectra.push_back(spec);
        detail::finish(res);
        return res;
      }
      try {
        const auto eig = eigen_subspace(cov, k);
        spec.eigenvalues = eig.eigenvalues;
        spec.s_k.emplace_back(k, eig.s_k);
        if (cov.centered && (eig.s_k < 0.0 || eig.s_k > 1.0)) spec.s_k_out_of_range = true;
        const Subspace& v = eig.subspace;
        const double captured =
            std::clamp((v.basis().transpose() * uncentered.sigma * v.basis()).trace(), 0.0, 1.0);
        spec.captured.emplace_back(k, captured);

        double alpha = std::nan(""), delta = 1.0, best = -1.0;
        const std::string driver = detail::driver_bound(cfg);
        for (double a : cfg.subspace.alpha_grid) {
          if (!(a < std::sqrt(captured))) continue;
          const double dl = std::min(1.0, svd_viability_delta(captured, a));
          const auto vh = estimate_viability(*prep.region, v, prep.eval_points, a);
          spec.viability.push_back({k, a, dl, vh.delta_hat, vh.std_err});
          const double s = driver.empty() ? 0.0 : detail::bound_sum(driver, prep.inputs, v, a, dl, cfg.eps);
          if (s > best) {
            best = s;
            alpha = a;
            delta = dl;
          }
        }
        const auto dists = along_subspace_distances(*prep.region, v, prep.eval_points, attack);
        const bool attack_based = !(attack.use_exact && has_exact_dV(*prep.region));
        if (std::isnan(alpha)) {
          // no admissible alpha: alpha-dependent bounds are reported as not applicable
          auto curve = detail::subspace_curve(cfg, seed, k, prep.inputs, v, dists, attack_based, 1.0, 1.0, std::nan(""));
          for (std::size_t b = 0; b < cfg.bounds.size(); ++b) {
            const auto& name = cfg.bounds[b].name;
            if (name == "smooth-A" || name == "smooth-B" || name == "almost-const") {
              for (auto& row : curve.rows) row.bounds[b] = std::nan("");
            }
          }
          for (auto& row : curve.rows) row.alpha = row.delta = std::nan("");
          res.curves.push_back(std::move(curve));
        } else {
          res.curves.push_back(detail::subspace_curve(cfg, seed, k, prep.inputs, v, dists, attack_based, alpha, delta,
                                                      std::nan("")));
        }
        ctl.note("seed " + std::to_string(seed) + " k=" + std::to_string(k) + " done");
      } catch (const Error& e) {
        res.curves.push_back(detail::error_curve(cfg, seed, k, e.what()));
        ++res.errors;
      }
    }
    res.spectra.push_back(std::move(spec));
  }
  detail::finish(res);
  return res;
}

/**
 * Per-sample success of the symmetric segment scan along v, made cumulative
 * over the eps grid: a point counts at eps_j once it is fooled at any
 * eps_i <= eps_j, which keeps the curve monotone without weakening the
 * certificate.
 */
inline std::vector<std::vector<char>> uap_success_table(const Region& region, const Vector& v,
                                                        std::span<const Vector> points, const std::vector<double>& eps,
                                                        int line_grid) {
  std::vector<std::vector<char>> table(points.size(), std::vector<char>(eps.size(), 0));
  parallel_for(points.size(), [&](std::size_t i) {
    char hit = 0;
    for (std::size_t j = 0; j < eps.size(); ++j) {
      if (!hit) hit = uap_succeeds(region, points[i], v, eps[j], line_grid);
      table[i][j] = hit;
    }
  });
  return table;
}

/**
 * Compact positive region (ball or cube) with a single direction: FR of the
 * best of n_directions candidates (best by mean rate over the grid) against
 * the ball bound g_d(eps/r) and the iso-volumetric bound g_d(eps/(2R)).
 */
inline ExperimentResult run_compact_experiment(const ExperimentConfig& cfg, const RunControl& ctl = {}) {
  require(cfg.subspace.scheme == "uap", Errc::ConfigError, "compact runner needs the uap scheme");
  ExperimentResult res;
  const auto sampler = build_sampler(cfg);
  const double d = static_cast<double>(cfg.d);
  for (int r = 0; r < cfg.n_repeats; ++r) {
    if (ctl.cancelled()) {
      res.cancelled = true;
      break;
    }
    const std::uint64_t seed = detail::repeat_seed(cfg, r);
    detail::Streams st(seed);
    try {
      const auto region = build_region(cfg, st.region, *sampler, st.data);
      const auto pts = sample_positive(*region, *sampler, cfg.n_samples, st.eval);
      double iso_radius = 0.0, ball_radius = std::nan("");
      if (const auto* b = dynamic_cast<const Ball*>(region.get())) {
        iso_radius = ball_radius = b->radius();
      } else if (const auto* c = dynamic_cast<const Cube*>(region.get())) {
        iso_radius = iso_volumetric_radius_from_log(d * std::log(2.0 * c->half_width()), d);
      }

      std::vector<Vector> dirs;
      if (cfg.subspace.direction == "eigen") {
        const auto held = sample_positive(*region, *sampler, std::max<std::size_t>(cfg.heldout(), 100), st.heldout);
        const auto cov = estimate_gradient_covariance(*region, held, false);
        dirs.push_back(eigen_subspace(cov, 1).subspace.basis().col(0));
      }
      while (static_cast<int>(dirs.size()) < cfg.subspace.n_directions) dirs.push_back(random_unit_vector(cfg.d, st.subspace));

      std::vector<double> best_rates;
      double best_sum = -1.0;
      for (const auto& v : dirs) {
        const auto table = uap_success_table(*region, v, pts, cfg.eps, cfg.attack.line_grid);
        std::vector<double> rates(cfg.eps.size(), 0.0);
        for (const auto& row : table)
          for (std::size_t j = 0; j < row.size(); ++j) rates[j] += row[j];
        double sum = 0.0;
        for (auto& x : rates) {
          x /= static_cast<double>(pts.size());
          sum += x;
        }
        if (sum > best_sum) {
          best_sum = sum;
          best_rates = rates;
        }
      }

      FoolingCurve curve;
      curve.experiment_id = cfg.experiment_id;
      curve.region = cfg.region.kind;
      curve.k = 1;
      curve.seed = seed;
      curve.bounds = detail::bound_columns(cfg);
      for (std::size_t j = 0; j < cfg.eps.size(); ++j) {
        CurveRow row;
        row.eps = cfg.eps[j];
        row.fr_hat = best_rates[j];
        row.std_err = binomial_stderr(row.fr_hat, pts.size());
        for (const auto& b : cfg.bounds) {
          double v = std::nan("");
          if (b.name == "gd" && !std::isnan(ball_radius)) v = g_d(d, row.eps / ball_radius);
          if (b.name == "compact" && iso_radius > 0.0) v = bound_compact(d, row.eps, iso_radius);
          row.bounds.push_back(v);
          row.bound_se.push_back(0.0);
        }
        row.alpha = 1.0;
        row.delta = 0.0;
        row.R = iso_radius;
        curve.rows.push_back(std::move(row));
      }
      res.curves.push_back(std::move(curve));
      ctl.note("seed " + std::to_string(seed) + " done");
    } catch (const Error& e) {
      res.curves.push_back(detail::error_curve(cfg, seed, 1, e.what()));
      ++res.errors;
    }
  }
  detail::finish(res);
  return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunControl& ctl = {}) {
  const auto& s = cfg.subspace.scheme;
  if (s == "eigen") return run_eigen_subspace_experiment(cfg, ctl);
  if (s == "uap") return run_compact_experiment(cfg, ctl);
  return run_random_subspace_experiment(cfg, ctl);
}

/// Header lines recorded in every CSV so a run is self-describing.
inline std::vector<std::pair<std::string, std::string>> report_metadata(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("config", effective_config(cfg).dump());
  meta.emplace_back("held_out", "conditions and covariances use a sample stream disjoint from the FR sample");
  meta.emplace_back("gaussian_expansion", "Phi(Phi^-1(p) + alpha_V eps / sigma)");
  return meta;
}

inline void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentResult& res, bool svg = true) {
  render_report(res.curves, cfg.csv_path(), svg ? cfg.svg_path() : std::filesystem::path(), report_metadata(cfg),
                cfg.experiment_id + " (" + cfg.region.kind + ", " + cfg.subspace.scheme + ")");
}

}  // namespace ldap
