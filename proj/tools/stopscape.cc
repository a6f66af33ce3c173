#include <chrono>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "stopscape/cleanse/cleanse.h"
#include "stopscape/cluster/analysis.h"
#include "stopscape/error.h"
#include "stopscape/ingest/poll.h"
#include "stopscape/kde/kde.h"
#include "stopscape/nna/nna.h"
#include "stopscape/report/export.h"
#include "stopscape/report/pipeline.h"
#include "stopscape/usage/usage.h"

namespace fs = std::filesystem;
using namespace stopscape;

namespace {

template <typename T>
std::vector<T> parse_list(std::string const& csv) {
  std::vector<T> out;
  std::stringstream ss{csv};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    std::istringstream in{item};
    T v;
    if (!(in >> v) || !(in >> std::ws).eof()) {
      throw domain_error{"invalid list element '" + item + "'"};
    }
    out.push_back(v);
  }
  return out;
}

std::vector<vehicle_observation> read_observations(fs::path const& p) {
  std::vector<vehicle_observation> out;
  for (auto& r : read_snapshots(p)) {
    out.push_back(std::move(r.observation));
  }
  return out;
}

fs::path sibling(fs::path const& p, std::string const& suffix) {
  return p.parent_path() / (p.stem().string() + suffix);
}

struct projected_stops {
  geo::local_projection proj;
  std::vector<geo::projected_point> points;
};

projected_stops project_stops(std::vector<stop> const& stops) {
  std::vector<lat_lon> coords;
  for (auto const& s : stops) {
    coords.push_back(s.position());
  }
  projected_stops out{geo::local_projection::centered_on(coords), {}};
  for (auto const& s : stops) {
    out.points.push_back(out.proj.project(s.position(), s.stop_id));
  }
  return out;
}

// Config files are flat `key = value` documents; keys without a section are
// filed under the verb being run so they reach its options.
class verb_config : public CLI::ConfigTOML {
public:
  std::string verb;

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    auto items = CLI::ConfigTOML::from_config(in);
    for (auto& item : items) {
      if (item.parents.empty() && !verb.empty()) {
        item.parents = {verb};
      }
    }
    return items;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transit stop spatial analysis: feed polling, cleansing, "
               "nearest-neighbour analysis, KDE and k-means clustering"};
  app.require_subcommand(1);
  // --config may follow the verb; command-line values win over file values.
  app.fallthrough();
  app.set_config("--config", "", "Flat key = value (TOML) file of option values");
  auto const formatter = std::make_shared<verb_config>();
  app.config_formatter(formatter);


  // poll
  std::string endpoint;
  int interval = 300;
  int duration = 8 * 24 * 3600;
  int timeout = 30;
  std::string api_key;
  std::string poll_out, stops_out;
  auto* poll_cmd =
      app.add_subcommand("poll", "Poll the vehicle feed into a store");
  poll_cmd->add_option("--endpoint", endpoint, "Feed base URL")->required();
  poll_cmd->add_option("--interval", interval, "Seconds between polls")
      ->capture_default_str();
  poll_cmd->add_option("--duration", duration, "Total polling seconds")
      ->capture_default_str();
  poll_cmd->add_option("--timeout", timeout, "HTTP timeout in seconds")
      ->capture_default_str();
  poll_cmd->add_option("--api-key", api_key, "Authorization header value");
  poll_cmd->add_option("--out", poll_out, "Snapshot NDJSON file")->required();
  poll_cmd->add_option("--stops-out", stops_out,
                       "Where to save the stop list (fetched once up front)");

  // clean
  std::string clean_in, clean_out, depots_path, report_path;
  double depot_radius = cleanse::default_depot_radius_m;
  auto* clean_cmd = app.add_subcommand("clean", "Apply the cleansing rules");
  clean_cmd->add_option("--in", clean_in, "Snapshot NDJSON")->required();
  clean_cmd->add_option("--out", clean_out, "Cleansed NDJSON")->required();
  clean_cmd->add_option("--depots", depots_path,
                        "GeoJSON depot points (optional radius property)");
  clean_cmd->add_option("--depot-radius", depot_radius,
                        "Default depot radius in metres")
      ->capture_default_str();
  clean_cmd->add_option("--report", report_path, "Cleanse report JSON")
      ->required();

  // usage
  std::string obs_path, stops_path, usage_out;
  double max_assign = 0.0;
  auto* usage_cmd = app.add_subcommand("usage", "Per-stop vehicle counts");
  usage_cmd->add_option("--observations", obs_path, "Cleansed NDJSON")
      ->required();
  usage_cmd->add_option("--stops", stops_path, "Stops JSON")->required();
  usage_cmd->add_option("--max-assign-distance", max_assign,
                        "Metres; 0 means unlimited");
  usage_cmd->add_option("--out", usage_out, "CSV stop_id,vehicle_count")
      ->required();

  // services
  std::size_t top = 10;
  std::string services_out;
  auto* services_cmd =
      app.add_subcommand("services", "Most frequently observed services");
  services_cmd->add_option("--observations", obs_path, "Cleansed NDJSON")
      ->required();
  services_cmd->add_option("--top", top, "Rows to keep (0 = all)")
      ->capture_default_str();
  services_cmd->add_option("--out", services_out, "CSV service_name,count")
      ->required();

  // nna
  std::string area_method = "hull";
  std::size_t bins = 50;
  double alpha = 0.01;
  std::string nna_out;
  auto* nna_cmd =
      app.add_subcommand("nna", "Clark-Evans nearest-neighbour analysis");
  nna_cmd->add_option("--stops", stops_path, "Stops JSON")->required();
  nna_cmd->add_option("--area-method", area_method, "hull or bbox")
      ->check(CLI::IsMember({"hull", "bbox"}))
      ->capture_default_str();
  nna_cmd->add_option("--bins", bins, "Histogram bins")->capture_default_str();
  nna_cmd->add_option("--alpha", alpha, "Significance level")
      ->capture_default_str();
  nna_cmd->add_option("--out", nna_out, "Result JSON")->required();

  // kde
  std::string usage_path, sweep, kde_out;
  double bandwidth = 300.0;
  std::size_t grid = 256;
  auto* kde_cmd = app.add_subcommand("kde", "Usage-weighted kernel density");
  kde_cmd->add_option("--stops", stops_path, "Stops JSON")->required();
  kde_cmd->add_option("--usage", usage_path, "Usage CSV")->required();
  kde_cmd->add_option("--bandwidth", bandwidth, "Bandwidth in metres")
      ->capture_default_str();
  kde_cmd->add_option("--sweep", sweep,
                      "Comma-separated bandwidths in metres");
  kde_cmd->add_option("--grid", grid, "Cells per axis")->capture_default_str();
  kde_cmd->add_option("--out", kde_out, "Density CSV (sidecar .json beside it)")
      ->required();

  // cluster
  std::size_t k = 4;
  std::uint64_t seed = 42;
  std::size_t restarts = 20;
  std::string k_range, geojson_out, cluster_out;
  bool project_features = false;
  auto* cluster_cmd =
      app.add_subcommand("cluster", "k-means clustering of stops");
  cluster_cmd->add_option("--stops", stops_path, "Stops JSON")->required();
  cluster_cmd->add_option("--usage", usage_path, "Usage CSV")->required();
  cluster_cmd->add_option("--k", k, "Number of clusters")->capture_default_str();
  cluster_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  cluster_cmd->add_option("--restarts", restarts, "k-means++ restarts")
      ->capture_default_str();
  cluster_cmd->add_option("--k-range", k_range,
                          "Comma-separated k values for the selection report");
  cluster_cmd->add_flag("--project-features", project_features,
                        "Cluster on projected metres instead of degrees");
  cluster_cmd->add_option("--geojson", geojson_out, "Also write stops GeoJSON");
  cluster_cmd->add_option("--out", cluster_out, "Per-stop CSV")->required();

  // pipeline
  report::pipeline_config cfg;
  std::string snapshots, pipe_depots, pipe_out, pipe_sweep = "100,300,500,800,1000",
                                                pipe_k_range = "2,3,4,5,6,7,8";
  std::string pipe_area = "hull";
  double pipe_max_assign = 0.0;
  auto* pipeline_cmd =
      app.add_subcommand("pipeline", "Run every analysis stage");
  pipeline_cmd->add_option("--endpoint", cfg.endpoint, "Feed URL (recorded only)");
  pipeline_cmd->add_option("--snapshots", snapshots, "Snapshot NDJSON")
      ->required();
  pipeline_cmd->add_option("--stops", stops_path, "Stops JSON")->required();
  pipeline_cmd->add_option("--depots", pipe_depots, "Depot GeoJSON");
  pipeline_cmd->add_option("--depot-radius", cfg.depot_radius, "Metres")
      ->capture_default_str();
  pipeline_cmd->add_option("--max-assign-distance", pipe_max_assign,
                           "Metres; 0 means unlimited");
  pipeline_cmd->add_option("--top", cfg.top_services, "Service table rows")
      ->capture_default_str();
  pipeline_cmd->add_option("--area-method", pipe_area, "hull or bbox")
      ->check(CLI::IsMember({"hull", "bbox"}))
      ->capture_default_str();
  pipeline_cmd->add_option("--bins", cfg.histogram_bins, "NN histogram bins")
      ->capture_default_str();
  pipeline_cmd->add_option("--alpha", cfg.alpha, "Significance level")
      ->capture_default_str();
  pipeline_cmd->add_option("--bandwidth", cfg.bandwidth, "KDE bandwidth, metres")
      ->capture_default_str();
  pipeline_cmd->add_option("--sweep", pipe_sweep, "Bandwidth sweep, metres")
      ->capture_default_str();
  pipeline_cmd->add_option("--grid", cfg.grid, "KDE cells per axis")
      ->capture_default_str();
  pipeline_cmd->add_option("--k", cfg.k, "Clusters")->capture_default_str();
  pipeline_cmd->add_option("--k-range", pipe_k_range, "k selection values")
      ->capture_default_str();
  pipeline_cmd->add_option("--seed", cfg.seed, "Random seed")
      ->capture_default_str();
  pipeline_cmd->add_option("--restarts", cfg.restarts, "k-means++ restarts")
      ->capture_default_str();
  pipeline_cmd->add_flag("--project-features", cfg.project_features,
                         "Cluster on projected metres");
  pipeline_cmd->add_option("--out", pipe_out, "Output directory")->required();

  for (auto i = 1; i < argc; ++i) {
    if (app.get_subcommand_no_throw(argv[i]) != nullptr) {
      formatter->verb = argv[i];
      break;
    }
  }
  CLI11_PARSE(app, argc, argv);

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (*poll_cmd) {
      http_options http{std::chrono::seconds{timeout}, std::nullopt};
      if (!api_key.empty()) {
        http.api_key = api_key;
      }
      if (!stops_out.empty()) {
        try {
          auto const stops = fetch_stops(endpoint, http);
          write_stops(stops_out, stops,
                      std::chrono::duration_cast<std::chrono::seconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count());
        } catch (ingest_error const& e) {
          std::cerr << "warning: stop fetch failed: " << e.what() << '\n';
        }
      }
      snapshot_store store{poll_out};
      auto const s = poll(endpoint, http,
                          {std::chrono::seconds{interval},
                           std::chrono::seconds{duration}},
                          store);
      std::cout << "attempts=" << s.attempts << " batches=" << s.batches
                << " records=" << s.records << " failures=" << s.failures
                << '\n';
    } else if (*clean_cmd) {
      std::vector<cleanse::depot_zone> zones;
      if (!depots_path.empty()) {
        zones = cleanse::read_depot_zones(depots_path, depot_radius);
      }
      auto const result = cleanse::cleanse(read_snapshots(clean_in), zones);
      report::write_snapshots(clean_out, result.kept);
      report::write_json(report_path, report::to_json(result.report));
    } else if (*usage_cmd) {
      usage::assign_options opt;
      if (max_assign > 0.0) {
        opt.max_assign_distance = max_assign;
      }
      auto const rows = usage::assign_vehicles_to_stops(
          read_observations(obs_path), read_stops(stops_path), opt);
      usage::write_usage_csv(usage_out, rows);
    } else if (*services_cmd) {
      usage::write_services_csv(
          services_out,
          usage::service_frequency_table(read_observations(obs_path), top));
    } else if (*nna_cmd) {
      auto const result =
          nna::run_nna(read_stops(stops_path),
                       {geo::parse_area_method(area_method), bins, alpha});
      report::write_json(nna_out, report::to_json(result));
    } else if (*kde_cmd) {
      auto const stops = read_stops(stops_path);
      auto const weights =
          usage::counts_for(stops, usage::read_usage_csv(usage_path));
      auto const ps = project_stops(stops);
      auto const g = kde::padded_grid(ps.points, 3.0 * bandwidth, grid);
      auto const density =
          kde::estimate_density(ps.points, weights, g, bandwidth, bandwidth);
      fs::path const out{kde_out};
      report::write_density_csv(out, density);
      auto meta = report::density_metadata(density, ps.proj);
      if (!sweep.empty()) {
        auto const hs = parse_list<double>(sweep);
        auto& arr = meta["sweep"] = report::json::array();
        for (auto const& e : kde::bandwidth_sweep(ps.points, weights, g, hs)) {
          auto const path = sibling(out, "_h" + report::format_number(e.h) + ".csv");
          report::write_density_csv(path, e.grid);
          arr.push_back({{"h", e.h},
                         {"csv", path.filename().generic_string()},
                         {"summary", report::to_json(e.summary)}});
        }
      }
      report::write_json(fs::path{out}.replace_extension(".json"), meta);
    } else if (*cluster_cmd) {
      auto const stops = read_stops(stops_path);
      auto const usage_rows = usage::read_usage_csv(usage_path);
      cluster::cluster_stops_options opt;
      opt.kmeans.k = k;
      opt.kmeans.seed = seed;
      opt.kmeans.restarts = restarts;
      opt.project_features = project_features;
      auto const result = cluster::cluster_stops(stops, usage_rows, opt);
      fs::path const out{cluster_out};
      report::write_cluster_csv(out, result.table);
      report::write_json(sibling(out, "_model.json"),
                         report::cluster_model_json(result));
      report::write_json(
          sibling(out, "_summary.json"),
          report::to_json(cluster::cluster_summary(result.model, result.table)));
      if (!k_range.empty()) {
        auto const ks = parse_list<std::size_t>(k_range);
        report::write_json(sibling(out, "_k_selection.json"),
                           report::to_json(cluster::k_selection_report(
                               result.features.matrix, ks, opt.kmeans)));
      }
      if (!geojson_out.empty()) {
        auto const counts = usage::counts_for(stops, usage_rows);
        std::vector<usage::stop_usage> aligned;
        for (auto i = 0U; i < stops.size(); ++i) {
          aligned.push_back(
              {stops[i].stop_id, static_cast<std::size_t>(counts[i])});
        }
        report::write_json(geojson_out,
                           report::emit_geojson(stops, aligned, result.table));
      }
    } else if (*pipeline_cmd) {
      cfg.snapshots = snapshots;
      cfg.stops = stops_path;
      if (!pipe_depots.empty()) {
        cfg.depots = pipe_depots;
      }
      if (pipe_max_assign > 0.0) {
        cfg.max_assign_distance = pipe_max_assign;
      }
      cfg.area_method = geo::parse_area_method(pipe_area);
      cfg.sweep = parse_list<double>(pipe_sweep);
      cfg.k_range = parse_list<std::size_t>(pipe_k_range);
      cfg.out_dir = pipe_out;
      auto const manifest = report::run_pipeline(cfg);
      std::cout << "wrote " << manifest.stages.size() << " stages to "
                << pipe_out << ", " << manifest.warnings.size()
                << " warnings\n";
    }
  } catch (stage_error const& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (std::exception const& e) {
    std::cerr << "[" << stage << "] " << e.what() << '\n';
    return 1;
  }
  return 0;
}
