#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ldap/ldap.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> samples;
  bool quiet = false;
};

ldap::ExperimentConfig load_with_overrides(const std::string& path, const Overrides& o) {
  auto cfg = ldap::load_config(path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  if (o.samples) {
    if (*o.samples < 100) throw ldap::Error(ldap::Errc::ConfigError, "field 'n_samples': --samples must be >= 100");
    cfg.n_samples = *o.samples;
  }
  return cfg;
}

void write_spectra(const ldap::ExperimentConfig& cfg, const ldap::ExperimentResult& res) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : res.spectra) {
    nlohmann::json j;
    j["seed"] = s.seed;
    j["centered"] = s.centered;
    j["trace"] = s.trace;
    j["eigenvalue_sum"] = s.eigenvalues.sum();
    j["eigenvalues"] = std::vector<double>(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
    j["s_k"] = s.s_k;
    j["captured_uncentered"] = s.captured;
    j["s_k_out_of_range"] = s.s_k_out_of_range;
    nlohmann::json via = nlohmann::json::array();
    for (const auto& v : s.viability) {
      via.push_back({{"k", v.k}, {"alpha", v.alpha}, {"delta_bound", v.delta_bound}, {"delta_hat", v.delta_hat},
                     {"stderr", v.std_err}});
    }
    j["viability"] = via;
    arr.push_back(j);
  }
  auto path = cfg.csv_path();
  path.replace_extension(".spectrum.json");
  ldap::write_text_file(path, arr.dump(2) + "\n");
  std::cout << path.string() << '\n';
}

int cmd_run(const std::string& config, const Overrides& o) {
  const auto cfg = load_with_overrides(config, o);
  ldap::RunControl ctl;
  ctl.cancel = &g_interrupted;
  if (!o.quiet) ctl.log = [](const std::string& s) { std::cerr << s << '\n'; };
  std::signal(SIGINT, on_sigint);
  const auto res = ldap::run_experiment(cfg, ctl);
  std::signal(SIGINT, SIG_DFL);
  if (res.curves.empty()) {
    std::cerr << "error: no curves produced\n";
    return 1;
  }
  ldap::write_experiment_outputs(cfg, res, !res.cancelled);
  std::cout << cfg.csv_path().string() << '\n';
  if (!res.cancelled) std::cout << cfg.svg_path().string() << '\n';
  if (!res.spectra.empty()) write_spectra(cfg, res);
  if (res.cancelled) {
    std::cerr << "interrupted: partial results written\n";
    return 1;
  }
  if (res.errors > 0) {
    std::cerr << res.errors << " run(s) failed; see the flag column\n";
    return 1;
  }
  if (res.flagged_rows > 0) {
    std::cerr << res.flagged_rows << " row(s) flagged for bound violations\n";
    return 2;
  }
  return 0;
}

int cmd_validate(const std::string& config) {
  ldap::load_config(config);
  return 0;
}

/// FR of a single subspace (first k, first repeat) over the eps grid; no bounds.
int cmd_attack(const std::string& config, const Overrides& o) {
  auto cfg = load_with_overrides(config, o);
  cfg.n_repeats = 1;
  cfg.bounds.clear();
  if (cfg.subspace.scheme == "random" || cfg.subspace.scheme == "eigen") cfg.subspace.ks.resize(1);
  const auto res = ldap::run_experiment(cfg);
  if (res.errors > 0) {
    std::cerr << "error: " << res.curves.front().rows.front().flag << '\n';
    return 1;
  }
  std::printf("eps,fr_hat,stderr\n");
  for (const auto& row : res.curves.front().rows) {
    std::printf("%s,%s,%s\n", ldap::format_double(row.eps).c_str(), ldap::format_double(row.fr_hat).c_str(),
                ldap::format_double(row.std_err).c_str());
  }
  return 0;
}

int cmd_report(const std::string& csv, const std::string& svg) {
  const auto curves = ldap::curves_from_csv(ldap::read_text_file(csv));
  if (curves.empty()) throw ldap::Error(ldap::Errc::IoError, "CSV '" + csv + "' holds no rows");
  std::filesystem::path out = svg;
  if (out.empty()) {
    out = csv;
    out.replace_extension(".svg");
  }
  ldap::write_text_file(out, ldap::curves_to_svg(curves, curves.front().experiment_id));
  std::cout << out.string() << '\n';
  return 0;
}

using Params = std::map<std::string, double>;

double need(const Params& p, const std::string& name) {
  const auto it = p.find(name);
  if (it == p.end()) throw ldap::Error(ldap::Errc::MissingParam, "missing parameter --" + name);
  return it->second;
}

void print_value(double v) { std::printf("%.12g\n", v); }

int cmd_bounds(const std::string& name, const Params& p) {
  using namespace ldap;
  if (name == "gd") {
    print_value(g_d(need(p, "d"), need(p, "eps")));
  } else if (name == "iso-radius") {
    const double d = need(p, "d");
    if (p.count("log-volume")) print_value(iso_volumetric_radius_from_log(p.at("log-volume"), d));
    else print_value(iso_volumetric_radius(need(p, "volume"), d));
  } else if (name == "compact") {
    print_value(bound_compact(need(p, "d"), need(p, "eps"), need(p, "radius")));
  } else if (name == "huber") {
    print_value(huber_envelope(need(p, "b"), need(p, "rho"), need(p, "r")));
  } else if (name == "soft-threshold") {
    print_value(soft_threshold_sup(need(p, "b"), need(p, "rho"), need(p, "r")));
  } else if (name == "gaussian-expansion") {
    print_value(gaussian_expansion_bound(need(p, "p"), need(p, "alpha"), need(p, "eps"), need(p, "sigma")));
  } else if (name == "random-polytope") {
    const auto b = random_polytope_bound(static_cast<Eigen::Index>(need(p, "d")), static_cast<Eigen::Index>(need(p, "k")),
                                         need(p, "t"), static_cast<Eigen::Index>(need(p, "n")), need(p, "p"),
                                         need(p, "eps"), need(p, "sigma"));
    std::printf("%.12g %.12g\n", b.value, b.prob_over_V);
  } else if (name == "svd-delta") {
    print_value(svd_viability_delta(need(p, "s"), need(p, "alpha")));
  } else if (name == "random-viability") {
    const auto v = random_viability_params(static_cast<Eigen::Index>(need(p, "d")),
                                           static_cast<Eigen::Index>(need(p, "k")), need(p, "t"));
    std::printf("%.12g %.12g\n", v.alpha, v.delta);
  } else if (name == "normal-cdf") {
    print_value(std_normal_cdf(need(p, "x")));
  } else if (name == "normal-quantile") {
    print_value(std_normal_quantile(need(p, "p")));
  } else {
    throw Error(Errc::UnknownBound, "unknown bound '" + name + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ldap_lab: subspace-constrained attacks and fooling-rate bounds"};
  app.require_subcommand(1);
  Overrides o;
  std::string config;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { o.seed = v; }, "Override the config seed");
    sub->add_option_function<std::string>("--out", [&](const std::string& v) { o.out = v; }, "Output directory");
    sub->add_option_function<std::size_t>("--samples", [&](const std::size_t& v) { o.samples = v; }, "Override n_samples");
    sub->add_flag("--quiet", o.quiet, "Suppress progress on stderr");
  };

  auto* run = app.add_subcommand("run", "Run the experiment described by a config");
  run->add_option("--config", config, "Config file")->required();
  add_common(run);

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("--config", config, "Config file")->required();

  auto* attack = app.add_subcommand("attack", "Fooling rate of one subspace over the eps grid");
  attack->add_option("--config", config, "Config file")->required();
  add_common(attack);

  std::string csv, svg;
  auto* report = app.add_subcommand("report", "Render an SVG plot from a CSV");
  report->add_option("--csv", csv, "CSV produced by run")->required();
  report->add_option("--svg", svg, "Output SVG (default: CSV path with .svg)");
  report->add_flag("--quiet", o.quiet);

  std::string bound_name;
  Params params;
  auto* bounds = app.add_subcommand("bounds", "Evaluate one closed-form bound");
  bounds->add_option("name", bound_name, "gd | iso-radius | compact | huber | soft-threshold | gaussian-expansion | "
                                         "random-polytope | svd-delta | random-viability | normal-cdf | normal-quantile")
      ->required();
  for (const char* key : {"d", "eps", "volume", "log-volume", "radius", "b", "rho", "r", "p", "alpha", "sigma", "k",
                          "t", "n", "s", "x"}) {
    const std::string k = key;
    bounds->add_option_function<double>("--" + k, [&params, k](const double& v) { params[k] = v; });
  }
  bounds->add_flag("--quiet", o.quiet);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(config, o);
    if (*validate) return cmd_validate(config);
    if (*attack) return cmd_attack(config, o);
    if (*report) return cmd_report(csv, svg);
    if (*bounds) return cmd_bounds(bound_name, params);
  } catch (const ldap::Error& e) {
    std::cerr << ldap::errc_name(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
