#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "ldap/config.hpp"

using namespace ldap;
using json = nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "schema": 1, "experiment_id": "t", "seed": 3, "d": 10,
    "region": {"kind": "halfspace", "b": 0.0},
    "data": {"kind": "gaussian", "sigma": 1.0},
    "subspace": {"scheme": "random", "k": [2, 5]},
    "eps": [0.5, 1.0],
    "n_samples": 200,
    "bounds": ["upper-convex"]
  })");
}

std::string config_error(const json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConfigError);
    return e.what();
  }
  ADD_FAILURE() << "expected a ConfigError";
  return {};
}

}  // namespace

TEST(Config, ShippedConfigsAreValid) {
  const std::filesystem::path dir = LDAP_CONFIG_DIR;
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 5);
}

TEST(Config, DefaultsAreMaterialized) {
  const auto cfg = parse_config(base());
  EXPECT_EQ(cfg.subspace.ks, (std::vector<long long>{2, 5}));
  EXPECT_EQ(cfg.heldout(), 200u);
  EXPECT_EQ(cfg.bounds.front().role, BoundRole::Upper);
  const json eff = effective_config(cfg);
  EXPECT_TRUE(eff.contains("attack"));
  EXPECT_TRUE(eff.contains("conditions"));
  EXPECT_EQ(eff["seed"], 3);
}

TEST(Config, EpsGridForms) {
  json j = base();
  j["eps"] = {{"start", 0.0}, {"stop", 2.0}, {"count", 5}};
  EXPECT_EQ(parse_config(j).eps, (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
  j["eps"] = {1.0, 0.5};
  EXPECT_NE(config_error(j).find("'eps'"), std::string::npos);
  j["eps"] = {-0.1, 0.5};
  EXPECT_NE(config_error(j).find("'eps'"), std::string::npos);
  j["eps"] = {0.5, 0.5};
  EXPECT_NE(config_error(j).find("strictly increasing"), std::string::npos);
}

TEST(Config, FieldDiagnostics) {
  json j = base();
  j["region"]["kind"] = "torus";
  EXPECT_NE(config_error(j).find("region.kind"), std::string::npos);
  j = base();
  j["n_samples"] = 50;
  EXPECT_NE(config_error(j).find("n_samples"), std::string::npos);
  j = base();
  j["surprise"] = 1;
  EXPECT_NE(config_error(j).find("surprise"), std::string::npos);
  j = base();
  j["subspace"]["k"] = {11};
  EXPECT_NE(config_error(j).find("subspace.k"), std::string::npos);
  j = base();
  j["bounds"] = {"gd"};
  EXPECT_NE(config_error(j).find("not available"), std::string::npos);
  j = base();
  j["bounds"] = {{{"name", "upper-convex"}, {"role", "sideways"}}};
  EXPECT_NE(config_error(j).find("bounds[].role"), std::string::npos);
  j = base();
  j["schema"] = 2;
  EXPECT_NE(config_error(j).find("schema"), std::string::npos);
  j = base();
  j["data"]["sigma"] = "wide";
  EXPECT_NE(config_error(j).find("data.sigma"), std::string::npos);
}

TEST(Config, MissingWeightsFile) {
  json j = base();
  j["region"] = {{"kind", "mlp-weights-file"}, {"path", "/nonexistent/net.json"}};
  EXPECT_NE(config_error(j).find("region.path"), std::string::npos);
  EXPECT_NO_THROW(parse_config(j, {}, false));
}

TEST(Config, UapNeedsBoundedPositiveRegion) {
  json j = base();
  j["subspace"] = {{"scheme", "uap"}};
  j["bounds"] = {"gd"};
  EXPECT_NE(config_error(j).find("region.kind"), std::string::npos);
  j["region"] = {{"kind", "ball"}, {"radius", 1.0}, {"orientation", "inside-positive"}};
  j["data"] = {{"kind", "uniform_ball"}, {"radius", 1.0}};
  EXPECT_NO_THROW(parse_config(j));
}

TEST(Config, MalformedJsonReportsLine) {
  const auto path = std::filesystem::temp_directory_path() / "ldap_bad_config.json";
  {
    std::ofstream out(path);
    out << "{\n  \"schema\": 1,\n  \"d\": ,\n}\n";
  }
  try {
    load_config(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConfigError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::filesystem::remove(path);
}

TEST(Config, BuildsRegionsDeterministically) {
  json j = base();
  j["region"] = {{"kind", "polytope"}, {"facets", 6}, {"offset_range", {0.5, 1.0}}};
  const auto cfg = parse_config(j);
  const auto sampler = build_sampler(cfg);
  Rng a(5), b(5), da(6), db(6);
  const auto ra = build_region(cfg, a, *sampler, da);
  const auto rb = build_region(cfg, b, *sampler, db);
  const Vector x = Vector::LinSpaced(10, -1.0, 1.0);
  EXPECT_EQ(ra->value(x), rb->value(x));
  EXPECT_EQ(ra->kind(), "polytope");
}

TEST(Config, CubeOfUnitBallVolume) {
  for (long long d : {1, 2, 10, 100}) {
    const double h = cube_half_width_of_unit_ball_volume(d);
    EXPECT_NEAR(static_cast<double>(d) * std::log(2.0 * h), log_unit_ball_volume(static_cast<double>(d)), 1e-9);
  }
}
