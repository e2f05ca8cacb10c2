#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldap/attacks.hpp"
#include "ldap/bounds.hpp"
#include "ldap/conditions.hpp"
#include "ldap/mlp.hpp"
#include "ldap/regions.hpp"
#include "ldap/report.hpp"
#include "ldap/samplers.hpp"

namespace ldap {

using nlohmann::json;

struct RegionSpec {
  std::string kind;
  json params = json::object();
};

struct DataSpec {
  std::string kind = "gaussian";
  double sigma = 1.0;
  double radius = 1.0;
  double half_width = 1.0;
};

struct SubspaceSpec {
  std::string scheme = "random";
  std::vector<long long> ks;
  int t_grid = 10;
  std::size_t n_grad = 1000;
  bool centered = true;
  std::vector<double> alpha_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::string basis_file;
  int n_directions = 1;
  std::string direction = "random";
};

struct BoundSpec {
  std::string name;
  BoundRole role = BoundRole::Lower;
};

struct ExperimentConfig {
  int schema = 1;
  std::string experiment_id = "experiment";
  std::uint64_t seed = 0;
  long long d = 0;
  RegionSpec region;
  DataSpec data;
  SubspaceSpec subspace;
  std::vector<double> eps;
  std::size_t n_samples = 1000;
  std::size_t n_heldout = 0;  // 0 means n_samples
  int n_repeats = 1;
  AttackConfig attack;
  ConditionConfig conditions;
  std::vector<BoundSpec> bounds;
  std::string out_dir = ".";
  std::string csv_name;
  std::string svg_name;
  std::filesystem::path base_dir;  // relative file references resolve against this

  std::size_t heldout() const { return n_heldout == 0 ? n_samples : n_heldout; }
  std::filesystem::path resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  }
  std::filesystem::path csv_path() const {
    return std::filesystem::path(out_dir) / (csv_name.empty() ? experiment_id + ".csv" : csv_name);
  }
  std::filesystem::path svg_path() const {
    return std::filesystem::path(out_dir) / (svg_name.empty() ? experiment_id + ".svg" : svg_name);
  }
};

inline const std::set<std::string>& subspace_bound_names() {
  static const std::set<std::string> s = {"strongslope",  "smooth-A",        "smooth-B",          "upper-convex",
                                          "almost-const", "halfspace-exact", "gaussian-expansion"};
  return s;
}

inline const std::set<std::string>& uap_bound_names() {
  static const std::set<std::string> s = {"gd", "compact"};
  return s;
}

inline BoundRole default_role(const std::string& bound) {
  if (bound == "upper-convex") return BoundRole::Upper;
  if (bound == "halfspace-exact") return BoundRole::Tight;
  return BoundRole::Lower;
}

namespace detail {

[[noreturn]] inline void config_fail(const std::string& field, const std::string& msg) {
  throw Error(Errc::ConfigError, "field '" + field + "': " + msg);
}

template <typename T>
T get_field(const json& obj, const std::string& key, const std::string& path, const T& fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_fail(path + key, "has the wrong type");
  }
}

template <typename T>
T require_field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) config_fail(path + key, "is required");
  return get_field<T>(obj, key, path, T{});
}

inline void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) config_fail(path + k, "is not a recognised key");
  }
}

inline std::vector<double> parse_eps_grid(const json& j) {
  std::vector<double> eps;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) config_fail("eps", "entries must be numbers");
      eps.push_back(v.get<double>());
    }
  } else if (j.is_object()) {
    check_keys(j, "eps.", {"start", "stop", "count"});
    const double start = require_field<double>(j, "start", "eps.");
    const double stop = require_field<double>(j, "stop", "eps.");
    const int count = require_field<int>(j, "count", "eps.");
    if (count < 1) config_fail("eps.count", "must be >= 1");
    for (int i = 0; i < count; ++i) {
      eps.push_back(count == 1 ? start : start + (stop - start) * i / static_cast<double>(count - 1));
    }
  } else {
    config_fail("eps", "must be an array or {start, stop, count}");
  }
  if (eps.empty()) config_fail("eps", "must not be empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!std::isfinite(eps[i]) || eps[i] < 0.0) config_fail("eps", "entries must be finite and nonnegative");
    if (i > 0 && !(eps[i] > eps[i - 1])) config_fail("eps", "grid must be strictly increasing");
  }
  return eps;
}

}  // namespace detail

/**
 * Parses and validates a config document. Errors are ConfigError naming the
 * offending field. File references (weights, basis) must exist when
 * check_files is set.
 */
inline ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir = {},
                                     bool check_files = true) {
  using detail::config_fail;
  using detail::get_field;
  using detail::require_field;
  if (!j.is_object()) config_fail("<root>", "config must be a JSON object");
  detail::check_keys(j, "", {"schema", "experiment_id", "seed", "d", "region", "data", "subspace", "eps",
                             "n_samples", "n_heldout", "n_repeats", "attack", "conditions", "bounds", "output"});
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  cfg.schema = require_field<int>(j, "schema", "");
  if (cfg.schema != 1) config_fail("schema", "unsupported version " + std::to_string(cfg.schema));
  cfg.experiment_id = get_field<std::string>(j, "experiment_id", "", cfg.experiment_id);
  if (cfg.experiment_id.empty()) config_fail("experiment_id", "must not be empty");
  cfg.seed = get_field<std::uint64_t>(j, "seed", "", 0);
  cfg.d = require_field<long long>(j, "d", "");
  if (cfg.d < 1) config_fail("d", "must be >= 1");

  // region
  if (!j.contains("region") || !j["region"].is_object()) config_fail("region", "is required and must be an object");
  const json& r = j["region"];
  cfg.region.kind = require_field<std::string>(r, "kind", "region.");
  cfg.region.params = r;
  const std::string& kind = cfg.region.kind;
  if (kind == "halfspace") {
    detail::check_keys(r, "region.", {"kind", "w", "b"});
    if (r.contains("w")) {
      const auto w = get_field<std::vector<double>>(r, "w", "region.", {});
      if (static_cast<long long>(w.size()) != cfg.d) config_fail("region.w", "must have d entries");
    }
    get_field<double>(r, "b", "region.", 0.0);
  } else if (kind == "ball") {
    detail::check_keys(r, "region.", {"kind", "radius", "orientation"});
    if (get_field<double>(r, "radius", "region.", 1.0) <= 0.0) config_fail("region.radius", "must be positive");
    const auto o = get_field<std::string>(r, "orientation", "region.", "inside-negative");
    if (o != "inside-negative" && o != "inside-positive") {
      config_fail("region.orientation", "must be inside-negative or inside-positive");
    }
  } else if (kind == "ellipsoid") {
    detail::check_keys(r, "region.", {"kind", "eigenvalues", "fill", "rotate", "radius"});
    const auto ev = require_field<std::vector<double>>(r, "eigenvalues", "region.");
    if (ev.empty() || static_cast<long long>(ev.size()) > cfg.d) config_fail("region.eigenvalues", "needs 1..d entries");
    for (double v : ev)
      if (v < 0.0) config_fail("region.eigenvalues", "must be nonnegative");
    if (get_field<double>(r, "fill", "region.", 0.0) < 0.0) config_fail("region.fill", "must be nonnegative");
    get_field<bool>(r, "rotate", "region.", false);
    if (r.contains("radius") && !(r["radius"].is_number() || r["radius"] == "median")) {
      config_fail("region.radius", "must be a number or \"median\"");
    }
    if (r.contains("radius") && r["radius"].is_number() && r["radius"].get<double>() <= 0.0) {
      config_fail("region.radius", "must be positive");
    }
  } else if (kind == "polytope") {
    detail::check_keys(r, "region.", {"kind", "facets", "offset_range"});
    if (require_field<long long>(r, "facets", "region.") < 1) config_fail("region.facets", "must be >= 1");
    const auto range = get_field<std::vector<double>>(r, "offset_range", "region.", {0.5, 1.5});
    if (range.size() != 2 || range[0] < 0.0 || range[1] < range[0]) {
      config_fail("region.offset_range", "must be [lo, hi] with 0 <= lo <= hi");
    }
  } else if (kind == "mlp") {
    detail::check_keys(r, "region.", {"kind", "widths", "activation", "output", "ridge"});
    const auto widths = require_field<std::vector<long long>>(r, "widths", "region.");
    if (widths.size() < 3) config_fail("region.widths", "needs input, at least one hidden layer and output");
    if (widths.front() != cfg.d) config_fail("region.widths", "first width must equal d");
    if (widths.back() != 1) config_fail("region.widths", "last width must be 1");
    for (auto w : widths)
      if (w < 1) config_fail("region.widths", "widths must be positive");
    try {
      parse_activation(get_field<std::string>(r, "activation", "region.", "relu"));
    } catch (const Error& e) {
      config_fail("region.activation", e.what());
    }
    const auto out = get_field<std::string>(r, "output", "region.", "random");
    if (out != "random" && out != "ridge") config_fail("region.output", "must be random or ridge");
    if (r.contains("ridge")) {
      const json& rd = r["ridge"];
      if (!rd.is_object()) config_fail("region.ridge", "must be an object");
      detail::check_keys(rd, "region.ridge.", {"n_train", "target_index", "lambda"});
      if (get_field<long long>(rd, "n_train", "region.ridge.", 2000) < 1) config_fail("region.ridge.n_train", "must be >= 1");
      const auto ti = get_field<long long>(rd, "target_index", "region.ridge.", 0);
      if (ti < 0 || ti >= cfg.d) config_fail("region.ridge.target_index", "must index an input coordinate");
      if (get_field<double>(rd, "lambda", "region.ridge.", 1e-2) < 0.0) config_fail("region.ridge.lambda", "must be >= 0");
    }
  } else if (kind == "mlp-weights-file") {
    detail::check_keys(r, "region.", {"kind", "path"});
    const auto path = require_field<std::string>(r, "path", "region.");
    if (check_files && !std::filesystem::exists(cfg.resolve(path))) {
      config_fail("region.path", "weights file '" + cfg.resolve(path).string() + "' does not exist");
    }
  } else if (kind == "cube") {
    detail::check_keys(r, "region.", {"kind", "half_width", "unit_ball_volume"});
    const bool ubv = get_field<bool>(r, "unit_ball_volume", "region.", false);
    if (!ubv && get_field<double>(r, "half_width", "region.", 1.0) <= 0.0) config_fail("region.half_width", "must be positive");
  } else {
    config_fail("region.kind", "unknown region kind '" + kind + "'");
  }

  // data
  if (!j.contains("data") || !j["data"].is_object()) config_fail("data", "is required and must be an object");
  const json& dj = j["data"];
  cfg.data.kind = require_field<std::string>(dj, "kind", "data.");
  if (cfg.data.kind == "gaussian") {
    detail::check_keys(dj, "data.", {"kind", "sigma"});
    cfg.data.sigma = get_field<double>(dj, "sigma", "data.", 1.0);
    if (!(cfg.data.sigma > 0.0)) config_fail("data.sigma", "must be positive");
  } else if (cfg.data.kind == "uniform_ball") {
    detail::check_keys(dj, "data.", {"kind", "radius"});
    cfg.data.radius = get_field<double>(dj, "radius", "data.", 1.0);
    if (!(cfg.data.radius > 0.0)) config_fail("data.radius", "must be positive");
  } else if (cfg.data.kind == "uniform_cube") {
    detail::check_keys(dj, "data.", {"kind", "half_width"});
    cfg.data.half_width = get_field<double>(dj, "half_width", "data.", 1.0);
    if (!(cfg.data.half_width > 0.0)) config_fail("data.half_width", "must be positive");
  } else {
    config_fail("data.kind", "unknown data kind '" + cfg.data.kind + "'");
  }

  // subspace
  if (!j.contains("subspace") || !j["subspace"].is_object()) config_fail("subspace", "is required and must be an object");
  const json& sj = j["subspace"];
  auto& ss = cfg.subspace;
  ss.scheme = require_field<std::string>(sj, "scheme", "subspace.");
  auto parse_ks = [&] {
    if (!sj.contains("k")) config_fail("subspace.k", "is required");
    if (sj["k"].is_number_integer()) {
      ss.ks = {sj["k"].get<long long>()};
    } else {
      ss.ks = get_field<std::vector<long long>>(sj, "k", "subspace.", {});
    }
    if (ss.ks.empty()) config_fail("subspace.k", "must list at least one dimension");
    for (auto k : ss.ks)
      if (k < 1 || k > cfg.d) config_fail("subspace.k", "entries must satisfy 1 <= k <= d");
  };
  if (ss.scheme == "random") {
    detail::check_keys(sj, "subspace.", {"scheme", "k", "t_grid"});
    parse_ks();
    ss.t_grid = get_field<int>(sj, "t_grid", "subspace.", 10);
    if (ss.t_grid < 1) config_fail("subspace.t_grid", "must be >= 1");
  } else if (ss.scheme == "eigen") {
    detail::check_keys(sj, "subspace.", {"scheme", "k", "n_grad", "centered", "alpha_grid"});
    parse_ks();
    ss.n_grad = get_field<std::size_t>(sj, "n_grad", "subspace.", 1000);
    if (ss.n_grad < 100) config_fail("subspace.n_grad", "must be >= 100");
    ss.centered = get_field<bool>(sj, "centered", "subspace.", true);
    ss.alpha_grid = get_field<std::vector<double>>(sj, "alpha_grid", "subspace.", ss.alpha_grid);
    for (double a : ss.alpha_grid)
      if (!(a > 0.0 && a < 1.0)) config_fail("subspace.alpha_grid", "entries must lie in (0, 1)");
  } else if (ss.scheme == "fixed") {
    detail::check_keys(sj, "subspace.", {"scheme", "basis_file"});
    ss.basis_file = require_field<std::string>(sj, "basis_file", "subspace.");
    if (check_files && !std::filesystem::exists(cfg.resolve(ss.basis_file))) {
      config_fail("subspace.basis_file", "file '" + cfg.resolve(ss.basis_file).string() + "' does not exist");
    }
  } else if (ss.scheme == "uap") {
    detail::check_keys(sj, "subspace.", {"scheme", "n_directions", "direction"});
    ss.ks = {1};
    ss.n_directions = get_field<int>(sj, "n_directions", "subspace.", 1);
    if (ss.n_directions < 1) config_fail("subspace.n_directions", "must be >= 1");
    ss.direction = get_field<std::string>(sj, "direction", "subspace.", "random");
    if (ss.direction != "random" && ss.direction != "eigen") config_fail("subspace.direction", "must be random or eigen");
    if (kind != "ball" && kind != "cube") config_fail("region.kind", "uap scheme needs a ball or cube region");
    if (kind == "ball" && get_field<std::string>(r, "orientation", "region.", "inside-negative") != "inside-positive") {
      config_fail("region.orientation", "uap scheme needs a bounded positive region (inside-positive)");
    }
  } else {
    config_fail("subspace.scheme", "unknown scheme '" + ss.scheme + "'");
  }

  if (!j.contains("eps")) config_fail("eps", "is required");
  cfg.eps = detail::parse_eps_grid(j["eps"]);

  const auto n = get_field<long long>(j, "n_samples", "", 1000);
  if (n < 100) config_fail("n_samples", "must be >= 100");
  cfg.n_samples = static_cast<std::size_t>(n);
  const auto nh = get_field<long long>(j, "n_heldout", "", 0);
  if (nh != 0 && nh < 100) config_fail("n_heldout", "must be >= 100");
  cfg.n_heldout = static_cast<std::size_t>(nh);
  cfg.n_repeats = get_field<int>(j, "n_repeats", "", 1);
  if (cfg.n_repeats < 1) config_fail("n_repeats", "must be >= 1");

  if (j.contains("attack")) {
    const json& a = j["attack"];
    if (!a.is_object()) config_fail("attack", "must be an object");
    detail::check_keys(a, "attack.", {"max_iters", "step_rule", "initial_step_rel", "shrink", "min_step_rel",
                                      "line_grid", "use_exact"});
    auto& at = cfg.attack;
    at.max_iters = get_field<int>(a, "max_iters", "attack.", at.max_iters);
    const auto rule = get_field<std::string>(a, "step_rule", "attack.", "backtracking");
    if (rule == "fixed") at.step_rule = StepRule::Fixed;
    else if (rule == "backtracking") at.step_rule = StepRule::Backtracking;
    else config_fail("attack.step_rule", "must be fixed or backtracking");
    at.initial_step_rel = get_field<double>(a, "initial_step_rel", "attack.", at.initial_step_rel);
    at.shrink = get_field<double>(a, "shrink", "attack.", at.shrink);
    at.min_step_rel = get_field<double>(a, "min_step_rel", "attack.", at.min_step_rel);
    at.line_grid = get_field<int>(a, "line_grid", "attack.", at.line_grid);
    at.use_exact = get_field<bool>(a, "use_exact", "attack.", at.use_exact);
    try {
      validate(at);
    } catch (const Error& e) {
      config_fail("attack", e.what());
    }
  }

  if (j.contains("conditions")) {
    const json& c = j["conditions"];
    if (!c.is_object()) config_fail("conditions", "must be an object");
    detail::check_keys(c, "conditions.", {"beta_quantile", "theta_quantile", "n_pairs", "R"});
    auto& cc = cfg.conditions;
    cc.beta_quantile = get_field<double>(c, "beta_quantile", "conditions.", cc.beta_quantile);
    cc.theta_quantile = get_field<double>(c, "theta_quantile", "conditions.", cc.theta_quantile);
    cc.n_pairs = get_field<std::size_t>(c, "n_pairs", "conditions.", cc.n_pairs);
    cc.R = get_field<double>(c, "R", "conditions.", cc.R);
    if (!(cc.beta_quantile >= 0.0 && cc.beta_quantile <= 1.0)) config_fail("conditions.beta_quantile", "must lie in [0, 1]");
    if (!(cc.theta_quantile >= 0.0 && cc.theta_quantile <= 1.0)) config_fail("conditions.theta_quantile", "must lie in [0, 1]");
    if (!(cc.R > 0.0)) config_fail("conditions.R", "must be positive");
  }

  if (j.contains("bounds")) {
    if (!j["bounds"].is_array()) config_fail("bounds", "must be an array");
    const auto& allowed = ss.scheme == "uap" ? uap_bound_names() : subspace_bound_names();
    for (const auto& b : j["bounds"]) {
      BoundSpec spec;
      if (b.is_string()) {
        spec.name = b.get<std::string>();
        spec.role = default_role(spec.name);
      } else if (b.is_object()) {
        detail::check_keys(b, "bounds[].", {"name", "role"});
        spec.name = require_field<std::string>(b, "name", "bounds[].");
        try {
          spec.role = b.contains("role") ? parse_role(b["role"].get<std::string>()) : default_role(spec.name);
        } catch (const Error& e) {
          config_fail("bounds[].role", e.what());
        } catch (const json::exception&) {
          config_fail("bounds[].role", "must be a string");
        }
      } else {
        config_fail("bounds", "entries must be names or {name, role} objects");
      }
      if (!allowed.count(spec.name)) {
        config_fail("bounds", "bound '" + spec.name + "' is not available for scheme '" + ss.scheme + "'");
      }
      cfg.bounds.push_back(spec);
    }
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    if (!o.is_object()) config_fail("output", "must be an object");
    detail::check_keys(o, "output.", {"dir", "csv", "svg"});
    cfg.out_dir = get_field<std::string>(o, "dir", "output.", cfg.out_dir);
    cfg.csv_name = get_field<std::string>(o, "csv", "output.", "");
    cfg.svg_name = get_field<std::string>(o, "svg", "output.", "");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path, bool check_files = true) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open config '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    const auto nl = text.rfind('\n', upto == 0 ? 0 : upto - 1);
    const std::size_t col = nl == std::string::npos || upto == 0 ? upto + 1 : upto - nl;
    throw Error(Errc::ConfigError, "config '" + path.string() + "' is not valid JSON at line " + std::to_string(line) +
                                       ", column " + std::to_string(col) + ": " + e.what());
  }
  return parse_config(j, path.parent_path(), check_files);
}

/// Effective settings, with defaults filled in, for the CSV header.
inline json effective_config(const ExperimentConfig& cfg) {
  json j;
  j["schema"] = cfg.schema;
  j["experiment_id"] = cfg.experiment_id;
  j["seed"] = cfg.seed;
  j["d"] = cfg.d;
  j["region"] = cfg.region.params;
  j["data"] = {{"kind", cfg.data.kind}};
  if (cfg.data.kind == "gaussian") j["data"]["sigma"] = cfg.data.sigma;
  if (cfg.data.kind == "uniform_ball") j["data"]["radius"] = cfg.data.radius;
  if (cfg.data.kind == "uniform_cube") j["data"]["half_width"] = cfg.data.half_width;
  const auto& ss = cfg.subspace;
  j["subspace"] = {{"scheme", ss.scheme}, {"k", ss.ks}};
  if (ss.scheme == "random") j["subspace"]["t_grid"] = ss.t_grid;
  if (ss.scheme == "eigen") {
    j["subspace"]["n_grad"] = ss.n_grad;
    j["subspace"]["centered"] = ss.centered;
    j["subspace"]["alpha_grid"] = ss.alpha_grid;
  }
  if (ss.scheme == "fixed") j["subspace"]["basis_file"] = ss.basis_file;
  if (ss.scheme == "uap") {
    j["subspace"]["n_directions"] = ss.n_directions;
    j["subspace"]["direction"] = ss.direction;
  }
  j["eps"] = cfg.eps;
  j["n_samples"] = cfg.n_samples;
  j["n_heldout"] = cfg.heldout();
  j["n_repeats"] = cfg.n_repeats;
  const auto& a = cfg.attack;
  j["attack"] = {{"max_iters", a.max_iters},
                 {"step_rule", a.step_rule == StepRule::Fixed ? "fixed" : "backtracking"},
                 {"initial_step_rel", a.initial_step_rel},
                 {"shrink", a.shrink},
                 {"min_step_rel", a.min_step_rel},
                 {"line_grid", a.line_grid},
                 {"use_exact", a.use_exact}};
  const auto& c = cfg.conditions;
  j["conditions"] = {{"beta_quantile", c.beta_quantile},
                     {"theta_quantile", c.theta_quantile},
                     {"n_pairs", c.n_pairs},
                     {"R", c.R}};
  json bounds = json::array();
  for (const auto& b : cfg.bounds) bounds.push_back({{"name", b.name}, {"role", role_name(b.role)}});
  j["bounds"] = bounds;
  return j;
}

// ---------------------------------------------------------------------------
// Builders

inline std::unique_ptr<Sampler> build_sampler(const ExperimentConfig& cfg) {
  const auto& dk = cfg.data.kind;
  if (dk == "gaussian") return std::make_unique<GaussianSampler>(cfg.d, cfg.data.sigma);
  if (dk == "uniform_ball") return std::make_unique<UniformBallSampler>(cfg.d, cfg.data.radius);
  return std::make_unique<UniformCubeSampler>(cfg.d, cfg.data.half_width);
}

/// Half width of the cube whose volume equals the unit ball's in R^d.
inline double cube_half_width_of_unit_ball_volume(long long d) {
  return 0.5 * std::exp(log_unit_ball_volume(static_cast<double>(d)) / static_cast<double>(d));
}

/// Haar-random orthogonal d x d matrix.
inline Matrix random_orthogonal(Eigen::Index d, Rng& rng) {
  return sample_random_subspace(d, d, rng).basis();
}

/**
 * Builds the configured region. Random pieces (weights, rotations, facets)
 * come from `rng`; `sampler` and `data_rng` supply data-dependent pieces
 * such as ridge training sets and the median ellipsoid radius.
 */
inline std::unique_ptr<Region> build_region(const ExperimentConfig& cfg, Rng& rng, const Sampler& sampler,
                                            Rng& data_rng) {
  const json& r = cfg.region.params;
  const auto& kind = cfg.region.kind;
  const Eigen::Index d = cfg.d;
  if (kind == "halfspace") {
    Vector w = Vector::Zero(d);
    if (r.contains("w")) {
      const auto wv = r["w"].get<std::vector<double>>();
      for (Eigen::Index i = 0; i < d; ++i) w[i] = wv[static_cast<std::size_t>(i)];
    } else {
      w[0] = 1.0;
    }
    return std::make_unique<HalfSpace>(w, r.value("b", 0.0));
  }
  if (kind == "ball") {
    const auto o = r.value("orientation", std::string("inside-negative"));
    return std::make_unique<Ball>(d, r.value("radius", 1.0),
                                  o == "inside-positive" ? BallOrientation::InsidePositive : BallOrientation::InsideNegative);
  }
  if (kind == "ellipsoid") {
    const auto ev = r["eigenvalues"].get<std::vector<double>>();
    const double fill = r.value("fill", 0.0);
    Vector lam = Vector::Constant(d, fill);
    for (std::size_t i = 0; i < ev.size(); ++i) lam[static_cast<Eigen::Index>(i)] = ev[i];
    Matrix b = lam.asDiagonal();
    if (r.value("rotate", false)) {
      const Matrix q = random_orthogonal(d, rng);
      b = q * lam.asDiagonal() * q.transpose();
      b = (b + b.transpose()).eval() / 2.0;
    }
    double radius = 1.0;
    if (r.contains("radius") && r["radius"].is_number()) {
      radius = r["radius"].get<double>();
    } else if (r.contains("radius")) {
      std::vector<double> q;
      for (std::size_t i = 0; i < 2001; ++i) {
        const Vector x = sampler.draw(data_rng);
        q.push_back(std::sqrt(std::max(0.0, x.dot(b * x))));
      }
      radius = lower_quantile(q, 0.5);
    }
    return std::make_unique<Ellipsoid>(b, radius);
  }
  if (kind == "polytope") {
    const auto range = r.value("offset_range", std::vector<double>{0.5, 1.5});
    return std::make_unique<Polytope>(random_polytope(d, r["facets"].get<long long>(), range[0], range[1], rng));
  }
  if (kind == "mlp") {
    const auto widths_ll = r["widths"].get<std::vector<long long>>();
    std::vector<Eigen::Index> widths(widths_ll.begin(), widths_ll.end());
    const Activation act = parse_activation(r.value("activation", std::string("relu")));
    std::optional<RidgeData> ridge;
    if (r.value("output", std::string("random")) == "ridge") {
      const json rd = r.value("ridge", json::object());
      RidgeData data;
      const auto n_train = rd.value("n_train", 2000LL);
      const auto target = rd.value("target_index", 0LL);
      data.lambda = rd.value("lambda", 1e-2);
      for (long long i = 0; i < n_train; ++i) {
        Vector x = sampler.draw(data_rng);
        data.targets.push_back(x[static_cast<Eigen::Index>(target)]);
        data.inputs.push_back(std::move(x));
      }
      ridge = std::move(data);
    }
    return std::make_unique<MlpNet>(init_random_mlp(widths, act, rng, ridge));
  }
  if (kind == "mlp-weights-file") {
    auto net = std::make_unique<MlpNet>(load_mlp(cfg.resolve(r["path"].get<std::string>()).string()));
    if (net->dim() != d) throw Error(Errc::ConfigError, "field 'region.path': network input width differs from d");
    return net;
  }
  // cube
  const double h = r.value("unit_ball_volume", false) ? cube_half_width_of_unit_ball_volume(d) : r.value("half_width", 1.0);
  return std::make_unique<Cube>(d, h);
}

/// Reads {"basis": [[column entries], ...]} and orthonormalizes it.
inline Subspace load_basis(const std::filesystem::path& path, Eigen::Index d) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open basis file '" + path.string() + "'");
  json j;
  try {
    in >> j;
    const auto cols = j.at("basis").get<std::vector<std::vector<double>>>();
    require(!cols.empty(), Errc::BadShape, "basis file lists no columns");
    Matrix m(d, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      require(static_cast<Eigen::Index>(cols[c].size()) == d, Errc::BadShape, "basis column length differs from d");
      for (Eigen::Index i = 0; i < d; ++i) m(i, static_cast<Eigen::Index>(c)) = cols[c][static_cast<std::size_t>(i)];
    }
    return orthonormalize(m);
  } catch (const json::exception& e) {
    throw Error(Errc::BadShape, "malformed basis file '" + path.string() + "': " + e.what());
  }
}

}  // namespace ldap
