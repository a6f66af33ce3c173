#include "stopscape/report/pipeline.h"

#include <chrono>
#include <cmath>

#include "stopscape/cleanse/cleanse.h"
#include "stopscape/cluster/analysis.h"
#include "stopscape/error.h"
#include "stopscape/kde/kde.h"
#include "stopscape/nna/nna.h"
#include "stopscape/report/export.h"
#include "stopscape/usage/usage.h"
#include "stopscape/warnings.h"

namespace stopscape::report {

namespace fs = std::filesystem;

namespace {

std::string path_string(fs::path const& p) { return p.generic_string(); }

std::string bandwidth_tag(double h) {
  return "kde_h" + format_number(h);
}

}  // namespace

void validate(pipeline_config const& c) {
  auto const require_file = [](fs::path const& p, char const* what) {
    if (p.empty() || !fs::is_regular_file(p)) {
      throw domain_error{std::string{what} + " file not found: " + p.string()};
    }
  };
  require_file(c.snapshots, "snapshots");
  require_file(c.stops, "stops");
  if (c.depots) {
    require_file(*c.depots, "depots");
  }
  if (!(c.depot_radius > 0.0)) {
    throw domain_error{"depot_radius must be positive"};
  }
  if (c.max_assign_distance && !(*c.max_assign_distance > 0.0)) {
    throw domain_error{"max_assign_distance must be positive"};
  }
  if (c.histogram_bins == 0) {
    throw domain_error{"bins must be at least 1"};
  }
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
    throw domain_error{"alpha must lie in (0, 1)"};
  }
  if (!(c.bandwidth > 0.0)) {
    throw domain_error{"bandwidth must be positive"};
  }
  for (auto const h : c.sweep) {
    if (!(h > 0.0)) {
      throw domain_error{"sweep bandwidths must be positive"};
    }
  }
  if (c.grid == 0) {
    throw domain_error{"grid must be at least 1"};
  }
  if (c.k == 0) {
    throw domain_error{"k must be at least 1"};
  }
  for (auto const k : c.k_range) {
    if (k == 0) {
      throw domain_error{"k_range values must be at least 1"};
    }
  }
  if (c.restarts == 0) {
    throw domain_error{"restarts must be at least 1"};
  }
  if (!(c.tolerance >= 0.0)) {
    throw domain_error{"tolerance must be non-negative"};
  }
  if (c.out_dir.empty()) {
    throw domain_error{"output directory not set"};
  }
}

nlohmann::ordered_json to_json(pipeline_config const& c) {
  nlohmann::ordered_json j;
  j["endpoint"] = c.endpoint;
  j["snapshots"] = path_string(c.snapshots);
  j["stops"] = path_string(c.stops);
  j["depots"] = c.depots ? nlohmann::ordered_json(path_string(*c.depots))
                         : nlohmann::ordered_json(nullptr);
  j["depot_radius"] = c.depot_radius;
  j["max_assign_distance"] =
      c.max_assign_distance ? nlohmann::ordered_json(*c.max_assign_distance)
                            : nlohmann::ordered_json(nullptr);
  j["top_services"] = c.top_services;
  j["area_method"] = std::string{geo::to_string(c.area_method)};
  j["histogram_bins"] = c.histogram_bins;
  j["alpha"] = c.alpha;
  j["bandwidth"] = c.bandwidth;
  j["sweep"] = c.sweep;
  j["grid"] = c.grid;
  j["k"] = c.k;
  j["k_range"] = c.k_range;
  j["seed"] = c.seed;
  j["restarts"] = c.restarts;
  j["max_iterations"] = c.max_iterations;
  j["tolerance"] = c.tolerance;
  j["project_features"] = c.project_features;
  j["out_dir"] = path_string(c.out_dir);
  return j;
}

nlohmann::ordered_json run_manifest::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = config;
  auto& in = j["inputs"] = nlohmann::ordered_json::array();
  for (auto const& p : inputs) {
    in.push_back(path_string(p));
  }
  auto& st = j["stages"] = nlohmann::ordered_json::array();
  for (auto const& s : stages) {
    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (auto const& p : s.outputs) {
      outs.push_back(path_string(p));
    }
    st.push_back({{"name", s.name},
                  {"outputs", std::move(outs)},
                  {"millis", s.millis}});
  }
  j["warnings"] = warnings;
  return j;
}

run_manifest run_pipeline(pipeline_config const& cfg) {
  run_manifest manifest;
  manifest.config = to_json(cfg);

  auto const& dir = cfg.out_dir;
  auto const partial_marker = dir / ".partial";
  warning_capture warnings;

  auto const fail = [&](std::string const& stage, std::string const& cause) {
    manifest.warnings = warnings.messages();
    nlohmann::ordered_json marker;
    marker["failed_stage"] = stage;
    marker["cause"] = cause;
    marker["manifest"] = manifest.to_json();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!ec) {
      try {
        write_json(partial_marker, marker);
      } catch (error const&) {
      }
    }
    throw stage_error{stage, cause};
  };

  try {
    validate(cfg);
    fs::create_directories(dir);
  } catch (std::exception const& e) {
    fail("config", e.what());
  }
  std::error_code ec;
  fs::remove(partial_marker, ec);
  manifest.inputs = {cfg.snapshots, cfg.stops};
  if (cfg.depots) {
    manifest.inputs.push_back(*cfg.depots);
  }

  auto const run_stage = [&](std::string const& name, auto&& body) {
    auto const start = std::chrono::steady_clock::now();
    stage_record rec{name, {}, 0.0};
    try {
      body(rec.outputs);
    } catch (std::exception const& e) {
      fail(name, e.what());
    }
    rec.millis = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();
    manifest.stages.push_back(std::move(rec));
  };

  std::vector<vehicle_observation> observations;
  std::vector<stop> stops;
  run_stage("cleanse", [&](auto& outputs) {
    auto records = read_snapshots(cfg.snapshots);
    if (records.empty()) {
      throw domain_error{"no observations in " + cfg.snapshots.string()};
    }
    std::vector<cleanse::depot_zone> zones;
    if (cfg.depots) {
      zones = cleanse::read_depot_zones(*cfg.depots, cfg.depot_radius);
    }
    auto result = cleanse::cleanse(std::move(records), zones);
    auto const cleansed_path = dir / "cleansed.ndjson";
    auto const report_path = dir / "cleanse_report.json";
    write_snapshots(cleansed_path, result.kept);
    write_json(report_path, to_json(result.report));
    outputs = {cleansed_path, report_path};
    observations.reserve(result.kept.size());
    for (auto& r : result.kept) {
      observations.push_back(std::move(r.observation));
    }
    stops = read_stops(cfg.stops);
  });

  std::vector<usage::stop_usage> stop_usage;
  run_stage("usage", [&](auto& outputs) {
    stop_usage = usage::assign_vehicles_to_stops(
        observations, stops, {cfg.max_assign_distance});
    auto const services =
        usage::service_frequency_table(observations, cfg.top_services);
    auto const usage_path = dir / "usage.csv";
    auto const services_path = dir / "services.csv";
    usage::write_usage_csv(usage_path, stop_usage);
    usage::write_services_csv(services_path, services);
    outputs = {usage_path, services_path};
  });

  run_stage("nna", [&](auto& outputs) {
    auto const result = nna::run_nna(
        stops, {cfg.area_method, cfg.histogram_bins, cfg.alpha});
    auto const path = dir / "nna.json";
    write_json(path, to_json(result));
    outputs = {path};
  });

  run_stage("kde", [&](auto& outputs) {
    std::vector<lat_lon> coords;
    for (auto const& s : stops) {
      coords.push_back(s.position());
    }
    auto const proj = geo::local_projection::centered_on(coords);
    std::vector<geo::projected_point> pts;
    for (auto const& s : stops) {
      pts.push_back(proj.project(s.position(), s.stop_id));
    }
    auto const weights = usage::counts_for(stops, stop_usage);
    auto const grid = kde::padded_grid(pts, 3.0 * cfg.bandwidth, cfg.grid);
    auto const density =
        kde::estimate_density(pts, weights, grid, cfg.bandwidth, cfg.bandwidth);
    auto const csv = dir / "kde.csv";
    auto const meta_path = dir / "kde.json";
    write_density_csv(csv, density);
    auto meta = density_metadata(density, proj);
    outputs = {csv, meta_path};

    auto& sweep = meta["sweep"] = json::array();
    auto const entries =
        cfg.sweep.empty()
            ? std::vector<kde::sweep_entry>{}
            : kde::bandwidth_sweep(pts, weights, grid, cfg.sweep);
    for (auto const& entry : entries) {
      auto const path = dir / (bandwidth_tag(entry.h) + ".csv");
      write_density_csv(path, entry.grid);
      outputs.push_back(path);
      sweep.push_back({{"h", entry.h},
                       {"csv", path.filename().generic_string()},
                       {"summary", to_json(entry.summary)}});
    }
    write_json(meta_path, meta);
  });

  run_stage("cluster", [&](auto& outputs) {
    cluster::cluster_stops_options opt;
    opt.kmeans.k = cfg.k;
    opt.kmeans.seed = cfg.seed;
    opt.kmeans.restarts = cfg.restarts;
    opt.kmeans.max_iterations = cfg.max_iterations;
    opt.kmeans.tolerance = cfg.tolerance;
    opt.project_features = cfg.project_features;
    auto const result = cluster::cluster_stops(stops, stop_usage, opt);
    auto const summary = cluster::cluster_summary(result.model, result.table);

    std::vector<std::size_t> ks;
    for (auto const k : cfg.k_range) {
      if (k <= stops.size()) {
        ks.push_back(k);
      }
    }
    auto const selection =
        cluster::k_selection_report(result.features.matrix, ks, opt.kmeans);

    auto const table_path = dir / "clusters.csv";
    auto const model_path = dir / "cluster_model.json";
    auto const summary_path = dir / "cluster_summary.json";
    auto const selection_path = dir / "k_selection.json";
    auto const geojson_path = dir / "stops.geojson";
    write_cluster_csv(table_path, result.table);
    write_json(model_path, cluster_model_json(result));
    write_json(summary_path, to_json(summary));
    write_json(selection_path, to_json(selection));
    write_json(geojson_path, emit_geojson(stops, stop_usage, result.table));
    outputs = {table_path, model_path, summary_path, selection_path,
               geojson_path};
  });

  manifest.warnings = warnings.messages();
  write_json(dir / "manifest.json", manifest.to_json());
  return manifest;
}

}  // namespace stopscape::report
