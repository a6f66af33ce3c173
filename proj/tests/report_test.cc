#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "stopscape/error.h"
#include "stopscape/report/export.h"
#include "stopscape/report/pipeline.h"

#include "support/synthetic_city.h"

using namespace stopscape;
using namespace stopscape::report;
namespace fs = std::filesystem;
namespace ts = stopscape::test_support;

namespace {

std::string slurp(fs::path const& p) {
  std::ifstream in{p, std::ios::binary};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Strict structural check of a FeatureCollection of Points (RFC 7946 subset).
std::string geojson_violation(json const& fc) {
  if (!fc.is_object() || fc.value("type", "") != "FeatureCollection")
    return "not a FeatureCollection";
  if (!fc.contains("features") || !fc["features"].is_array())
    return "features missing";
  for (auto const& f : fc["features"]) {
    if (!f.is_object() || f.value("type", "") != "Feature") return "bad feature";
    if (!f.contains("properties") ||
        !(f["properties"].is_object() || f["properties"].is_null()))
      return "bad properties";
    auto const& g = f["geometry"];
    if (!g.is_object() || g.value("type", "") != "Point") return "bad geometry";
    auto const& c = g["coordinates"];
    if (!c.is_array() || c.size() < 2 || c.size() > 3) return "bad position";
    for (auto const& v : c)
      if (!v.is_number()) return "non-numeric position";
    if (std::abs(c[0].get<double>()) > 180.0 || std::abs(c[1].get<double>()) > 90.0)
      return "position out of range";
  }
  return {};
}

struct cli_result {
  int status;
  std::string err;
};

cli_result run_cli(std::string const& args, fs::path const& dir) {
  auto const err = dir / "stderr.txt";
  auto const cmd = std::string{STOPSCAPE_CLI} + " " + args + " >" +
                   (dir / "stdout.txt").string() + " 2>" + err.string();
  auto const rc = std::system(cmd.c_str());
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, slurp(err)};
}

pipeline_config fixture_config(ts::fixture_paths const& fx, fs::path out) {
  pipeline_config cfg;
  cfg.snapshots = fx.snapshots;
  cfg.stops = fx.stops;
  cfg.depots = fx.depots;
  cfg.grid = 96;
  cfg.k = 3;
  cfg.k_range = {2, 3, 4};
  cfg.restarts = 10;
  cfg.out_dir = std::move(out);
  return cfg;
}

std::map<std::string, std::string> analysis_outputs(fs::path const& dir) {
  std::map<std::string, std::string> out;
  for (auto const& e : fs::directory_iterator{dir}) {
    auto const name = e.path().filename().string();
    if (name != "manifest.json") out[name] = slurp(e.path());
  }
  return out;
}

}  // namespace

TEST(geojson, single_stop_lon_lat_order) {
  std::vector<stop> const stops{{"36232658", "Princes St", 55.9521, -3.1967}};
  std::vector<usage::stop_usage> const u{{"36232658", 12}};
  std::vector<cluster::stop_cluster_row> const t{{"36232658", 55.9521, -3.1967, 12, 2}};
  auto const fc = emit_geojson(stops, u, t);
  EXPECT_EQ(geojson_violation(fc), "");
  ASSERT_EQ(fc["features"].size(), 1U);
  auto const& f = fc["features"][0];
  EXPECT_EQ(f["geometry"]["coordinates"][0].get<double>(), -3.1967);
  EXPECT_EQ(f["geometry"]["coordinates"][1].get<double>(), 55.9521);
  EXPECT_EQ(f["properties"]["stop_id"], "36232658");
  EXPECT_EQ(f["properties"]["name"], "Princes St");
  EXPECT_EQ(f["properties"]["vehicle_count"], 12);
  EXPECT_EQ(f["properties"]["cluster"], 2);
  // survives a text round trip unchanged
  EXPECT_EQ(json::parse(fc.dump()), fc);
}

TEST(geojson, feature_count_and_mismatch) {
  auto const city = ts::make_synthetic_city(3, 10);
  std::vector<usage::stop_usage> u;
  std::vector<cluster::stop_cluster_row> t;
  for (auto i = 0U; i < city.stops.size(); ++i) {
    auto const& s = city.stops[i];
    u.push_back({s.stop_id, city.counts[i]});
    t.push_back({s.stop_id, s.latitude, s.longitude, city.counts[i], city.labels[i]});
  }
  auto const fc = emit_geojson(city.stops, u, t);
  EXPECT_EQ(geojson_violation(fc), "");
  EXPECT_EQ(fc["features"].size(), city.stops.size());

  auto bad = u;
  bad[3].stop_id = "nope";
  EXPECT_THROW(emit_geojson(city.stops, bad, t), consistency_error);
  t.pop_back();
  EXPECT_THROW(emit_geojson(city.stops, u, t), consistency_error);
}

TEST(export_, number_formatting_and_nna_fields) {
  EXPECT_EQ(format_number(300.0), "300");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);

  std::vector<stop> stops;
  for (auto i = 0; i < 12; ++i) {
    stops.push_back({std::to_string(i), "", 55.9 + 0.01 * (i % 4), -3.2 + 0.013 * (i / 4)});
  }
  auto const j = to_json(nna::run_nna(stops));
  for (auto key : {"r_bar_A", "r_bar_E", "R", "sigma_rE", "z", "log10_p_two_tailed",
                   "p", "N", "area", "rho", "area_method", "alpha", "significant",
                   "pattern", "histogram"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["N"], 12);
  EXPECT_EQ(j["area_method"], "convex_hull");
}

TEST(pipeline, synthetic_city_manifest_and_determinism) {
  auto const city = ts::make_synthetic_city();
  auto const dir = ts::scratch_dir("pipeline");
  auto const fx = ts::write_fixture(city, dir / "in");

  auto const m = run_pipeline(fixture_config(fx, dir / "a"));
  ASSERT_EQ(m.stages.size(), 5U);
  std::vector<std::string> names;
  for (auto const& s : m.stages) names.push_back(s.name);
  EXPECT_EQ(names, (std::vector<std::string>{"cleanse", "usage", "nna", "kde", "cluster"}));
  EXPECT_TRUE(m.warnings.empty());

  // every file in the output directory is listed in the manifest
  std::set<std::string> listed{"manifest.json"};
  for (auto const& s : m.stages) {
    EXPECT_FALSE(s.outputs.empty());
    for (auto const& p : s.outputs) {
      EXPECT_TRUE(fs::exists(p)) << p;
      listed.insert(p.filename().string());
    }
  }
  std::set<std::string> present;
  for (auto const& e : fs::directory_iterator{dir / "a"})
    present.insert(e.path().filename().string());
  EXPECT_EQ(present, listed);

  auto const written = json::parse(slurp(dir / "a" / "manifest.json"));
  EXPECT_EQ(written["stages"].size(), 5U);
  EXPECT_TRUE(written["warnings"].empty());
  EXPECT_EQ(written["config"]["seed"], 42);
  EXPECT_EQ(written["config"]["k"], 3);

  auto const report = json::parse(slurp(dir / "a" / "cleanse_report.json"));
  EXPECT_EQ(report["removed_null_heading"], city.expected_removals.null_heading);
  EXPECT_EQ(report["removed_depot"], city.expected_removals.depot);

  run_pipeline(fixture_config(fx, dir / "b"));
  auto const a = analysis_outputs(dir / "a");
  auto const b = analysis_outputs(dir / "b");
  ASSERT_EQ(a.size(), b.size());
  for (auto const& [name, bytes] : a) {
    EXPECT_TRUE(b.at(name) == bytes) << name << " differs";
  }
}

TEST(pipeline, empty_store_aborts_at_cleanse) {
  auto const city = ts::make_synthetic_city(7, 5);
  auto const dir = ts::scratch_dir("pipeline-empty");
  auto fx = ts::write_fixture(city, dir / "in");
  std::ofstream{fx.snapshots, std::ios::trunc};
  try {
    run_pipeline(fixture_config(fx, dir / "out"));
    FAIL() << "expected stage_error";
  } catch (stage_error const& e) {
    EXPECT_EQ(e.stage(), "cleanse");
    EXPECT_NE(std::string{e.what()}.find("no observations"), std::string::npos);
  }
  auto const marker = json::parse(slurp(dir / "out" / ".partial"));
  EXPECT_EQ(marker["failed_stage"], "cleanse");
  EXPECT_FALSE(fs::exists(dir / "out" / "manifest.json"));
}

TEST(pipeline, invalid_config_is_reported) {
  pipeline_config cfg;
  cfg.snapshots = "/definitely/missing.ndjson";
  cfg.stops = "/definitely/missing.json";
  cfg.out_dir = ts::scratch_dir("pipeline-config") / "out";
  EXPECT_THROW(run_pipeline(cfg), stage_error);
  auto good = cfg;
  auto const fx = ts::write_fixture(ts::make_synthetic_city(7, 5),
                                    ts::scratch_dir("pipeline-config-in"));
  good.snapshots = fx.snapshots;
  good.stops = fx.stops;
  for (auto mutate : std::vector<std::function<void(pipeline_config&)>>{
           [](auto& c) { c.bandwidth = 0.0; },
           [](auto& c) { c.grid = 0; },
           [](auto& c) { c.k = 0; },
           [](auto& c) { c.restarts = 0; },
           [](auto& c) { c.alpha = 1.5; },
           [](auto& c) { c.sweep = {300.0, -1.0}; }}) {
    auto c = good;
    mutate(c);
    EXPECT_THROW(validate(c), domain_error);
  }
  EXPECT_NO_THROW(validate(good));
}

TEST(pipeline, partial_outputs_kept_when_late_stage_fails) {
  auto const dir = ts::scratch_dir("pipeline-late");
  auto const fx = ts::write_fixture(ts::make_synthetic_city(7, 5), dir / "in");
  auto cfg = fixture_config(fx, dir / "out");
  cfg.k = 10'000;  // more clusters than stops: fails in the cluster stage
  try {
    run_pipeline(cfg);
    FAIL();
  } catch (stage_error const& e) {
    EXPECT_EQ(e.stage(), "cluster");
  }
  EXPECT_TRUE(fs::exists(dir / "out" / "nna.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "kde.csv"));
  auto const marker = json::parse(slurp(dir / "out" / ".partial"));
  EXPECT_EQ(marker["failed_stage"], "cluster");
  EXPECT_EQ(marker["manifest"]["stages"].size(), 4U);
}

TEST(cli, verbs_end_to_end) {
  auto const city = ts::make_synthetic_city(7, 15);
  auto const dir = ts::scratch_dir("cli");
  auto const fx = ts::write_fixture(city, dir / "in");
  auto const d = dir.string();

  auto r = run_cli("clean --in " + fx.snapshots.string() + " --out " + d +
                       "/clean.ndjson --depots " + fx.depots.string() +
                       " --report " + d + "/report.json",
                   dir);
  ASSERT_EQ(r.status, 0) << r.err;
  auto const report = json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["removed_depot"], city.expected_removals.depot);

  r = run_cli("usage --observations " + d + "/clean.ndjson --stops " +
                  fx.stops.string() + " --out " + d + "/usage.csv",
              dir);
  ASSERT_EQ(r.status, 0) << r.err;
  auto const usage_rows = usage::read_usage_csv(dir / "usage.csv");
  ASSERT_EQ(usage_rows.size(), city.stops.size());
  for (auto i = 0U; i < usage_rows.size(); ++i)
    EXPECT_EQ(usage_rows[i].vehicle_count, city.counts[i]);

  r = run_cli("services --observations " + d + "/clean.ndjson --top 3 --out " + d +
                  "/services.csv",
              dir);
  ASSERT_EQ(r.status, 0) << r.err;
  auto const services = slurp(dir / "services.csv");
  EXPECT_EQ(services.substr(0, services.find('\n')), "service_name,count");
  EXPECT_EQ(std::count(services.begin(), services.end(), '\n'), 4);

  r = run_cli("nna --stops " + fx.stops.string() + " --area-method bbox --out " + d +
                  "/nna.json",
              dir);
  ASSERT_EQ(r.status, 0) << r.err;
  auto const nna = json::parse(slurp(dir / "nna.json"));
  EXPECT_EQ(nna["area_method"], "bounding_box");
  EXPECT_LT(nna["R"].get<double>(), 1.0);

  r = run_cli("kde --stops " + fx.stops.string() + " --usage " + d +
                  "/usage.csv --grid 32 --sweep 100,500 --out " + d + "/kde.csv",
              dir);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "kde_h100.csv"));
  EXPECT_TRUE(fs::exists(dir / "kde_h500.csv"));
  auto const meta = json::parse(slurp(dir / "kde.json"));
  EXPECT_EQ(meta["sweep"].size(), 2U);
  auto const kde = slurp(dir / "kde.csv");
  EXPECT_EQ(std::count(kde.begin(), kde.end(), '\n'), 32 * 32 + 1);

  // option values from --config
  {
    std::ofstream cfg{dir / "cluster.toml"};
    cfg << "k = 3\nseed = 5\nrestarts = 8\nk-range = \"2,3,4\"\n";
  }
  r = run_cli("cluster --config " + d + "/cluster.toml --stops " + fx.stops.string() +
                  " --usage " + d + "/usage.csv --geojson " + d +
                  "/stops.geojson --out " + d + "/clusters.csv",
              dir);
  ASSERT_EQ(r.status, 0) << r.err;
  auto const model = json::parse(slurp(dir / "clusters_model.json"));
  EXPECT_EQ(model["k"], 3);
  EXPECT_EQ(model["seed"], 5);
  EXPECT_EQ(model["restarts"], 8);
  EXPECT_TRUE(fs::exists(dir / "clusters_summary.json"));
  EXPECT_EQ(json::parse(slurp(dir / "clusters_k_selection.json")).size(), 3U);
  auto const fc = json::parse(slurp(dir / "stops.geojson"));
  EXPECT_EQ(geojson_violation(fc), "");
  EXPECT_EQ(fc["features"].size(), city.stops.size());

  // an explicit flag wins over the config file
  r = run_cli("cluster --config " + d + "/cluster.toml --k 2 --stops " +
                  fx.stops.string() + " --usage " + d + "/usage.csv --out " + d +
                  "/clusters2.csv",
              dir);
  ASSERT_EQ(r.status, 0) << r.err;
  auto const model2 = json::parse(slurp(dir / "clusters2_model.json"));
  EXPECT_EQ(model2["k"], 2);
  EXPECT_EQ(model2["seed"], 5);
}

TEST(cli, pipeline_verb_and_errors) {
  auto const city = ts::make_synthetic_city(7, 10);
  auto const dir = ts::scratch_dir("cli-pipeline");
  auto const fx = ts::write_fixture(city, dir / "in");
  {
    std::ofstream cfg{dir / "run.toml"};
    cfg << "snapshots = \"" << fx.snapshots.generic_string() << "\"\n"
        << "stops = \"" << fx.stops.generic_string() << "\"\n"
        << "depots = \"" << fx.depots.generic_string() << "\"\n"
        << "grid = 48\nk = 3\nrestarts = 5\nk-range = \"2,3\"\n";
  }
  auto r = run_cli("pipeline --config " + (dir / "run.toml").string() + " --out " +
                       (dir / "out").string(),
                   dir);
  ASSERT_EQ(r.status, 0) << r.err;
  auto const manifest = json::parse(slurp(dir / "out" / "manifest.json"));
  EXPECT_EQ(manifest["stages"].size(), 5U);
  EXPECT_EQ(manifest["config"]["grid"], 48);

  std::ofstream{dir / "empty.ndjson"};
  r = run_cli("pipeline --snapshots " + (dir / "empty.ndjson").string() + " --stops " +
                  fx.stops.string() + " --out " + (dir / "out2").string(),
              dir);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("[cleanse]"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("no observations"), std::string::npos) << r.err;

  r = run_cli("nna --stops " + (dir / "missing.json").string() + " --out " +
                  (dir / "x.json").string(),
              dir);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("[nna]"), std::string::npos) << r.err;

  r = run_cli("bogus", dir);
  EXPECT_NE(r.status, 0);
}
