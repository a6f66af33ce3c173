#include "stopscape/report/export.h"

#include <charconv>
#include <fstream>

#include "csv.h"
#include "stopscape/error.h"
#include "stopscape/nna/normal_tail.h"

namespace stopscape::report {

std::string format_number(double v) {
  char buf[64];
  auto const [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) {
    throw error{"number formatting failed"};
  }
  return {buf, end};
}

void write_text(std::filesystem::path const& p, std::string const& content) {
  std::ofstream out{p, std::ios::binary | std::ios::trunc};
  out << content;
  out.flush();
  if (!out) {
    throw error{"cannot write " + p.string()};
  }
}

void write_json(std::filesystem::path const& p, json const& j) {
  write_text(p, j.dump(2) + "\n");
}

json to_json(cleanse::cleanse_report const& r) {
  return {{"input_count", r.input_count},
          {"removed_null_heading", r.removed_null_heading},
          {"removed_depot", r.removed_depot},
          {"removed_inactive_route", r.removed_inactive_route},
          {"removed_unserviced", r.removed_unserviced},
          {"output_count", r.output_count}};
}

json to_json(nna::nna_result const& r) {
  json hist = json::array();
  for (auto const& b : r.histogram) {
    hist.push_back({{"bin_lower_m", b.lower},
                    {"bin_upper_m", b.upper},
                    {"count", b.count}});
  }
  return {{"r_bar_A", r.r_bar_a},
          {"r_bar_E", r.r_bar_e},
          {"R", r.nni},
          {"sigma_rE", r.sigma_re},
          {"z", r.z},
          {"log10_p_two_tailed", r.log10_p_two_tailed},
          {"p", r.formatted_p()},
          {"N", r.n},
          {"area", r.area},
          {"rho", r.rho},
          {"area_method", std::string{geo::to_string(r.method)}},
          {"alpha", r.alpha},
          {"significant", r.significant},
          {"pattern", std::string{nna::to_string(r.classification)}},
          {"histogram", std::move(hist)}};
}

json to_json(kde::grid_summary const& s) {
  return {{"max", s.max},
          {"argmax_cell", {s.argmax.ix, s.argmax.iy}},
          {"top_decile_mass_fraction", s.top_decile_mass_fraction},
          {"local_maxima", s.local_maxima}};
}

void write_snapshots(std::filesystem::path const& p,
                     std::span<snapshot_record const> records) {
  std::string buf;
  for (auto const& r : records) {
    buf += to_snapshot_line(r);
    buf += '\n';
  }
  write_text(p, buf);
}

void write_density_csv(std::filesystem::path const& p,
                       kde::density_grid const& d) {
  std::string buf = "cell_x_center,cell_y_center,density,intensity\n";
  for (auto iy = 0U; iy < d.grid.ny; ++iy) {
    for (auto ix = 0U; ix < d.grid.nx; ++ix) {
      buf += format_number(d.grid.center_x(ix));
      buf += ',';
      buf += format_number(d.grid.center_y(iy));
      buf += ',';
      buf += format_number(d.at(ix, iy));
      buf += ',';
      buf += format_number(d.intensity(ix, iy));
      buf += '\n';
    }
  }
  write_text(p, buf);
}

json density_metadata(kde::density_grid const& d,
                      geo::local_projection const& proj) {
  return {{"origin_x", d.grid.origin_x},
          {"origin_y", d.grid.origin_y},
          {"cell_width", d.grid.cell_width},
          {"cell_height", d.grid.cell_height},
          {"nx", d.grid.nx},
          {"ny", d.grid.ny},
          {"h_x", d.h_x},
          {"h_y", d.h_y},
          {"total_weight", d.total_weight},
          {"integral", d.integral()},
          {"projection",
           {{"type", "local_equirectangular"},
            {"reference_latitude", proj.reference().lat},
            {"reference_longitude", proj.reference().lon},
            {"earth_radius_m", geo::earth_radius_m}}},
          {"summary", to_json(kde::summarize(d))}};
}

void write_cluster_csv(std::filesystem::path const& p,
                       std::span<cluster::stop_cluster_row const> rows) {
  std::string buf = "stop_id,lat,lon,count,cluster\n";
  for (auto const& r : rows) {
    buf += detail::csv_field(r.stop_id) + ',' + format_number(r.lat) + ',' +
           format_number(r.lon) + ',' + std::to_string(r.count) + ',' +
           std::to_string(r.cluster) + '\n';
  }
  write_text(p, buf);
}

json cluster_model_json(cluster::stop_clustering const& c) {
  auto const& m = c.model;
  auto const& f = c.features;
  json std_centroids = json::array();
  json raw_centroids = json::array();
  for (auto a = 0U; a < m.k; ++a) {
    auto const row = m.centroids.row(a);
    std_centroids.push_back(std::vector<double>(row.begin(), row.end()));
    raw_centroids.push_back(cluster::to_raw(f, row));
  }
  json constant = json::array();
  for (auto const flag : f.constant_columns) {
    constant.push_back(static_cast<bool>(flag));
  }
  return {{"k", m.k},
          {"features", {"latitude", "longitude", "vehicle_count"}},
          {"means", f.means},
          {"stds", f.stds},
          {"constant_columns", std::move(constant)},
          {"centroids_standardized", std::move(std_centroids)},
          {"centroids_raw", std::move(raw_centroids)},
          {"cluster_sizes", m.cluster_sizes()},
          {"inertia", m.inertia},
          {"iterations", m.iterations},
          {"seed", m.seed},
          {"restarts", m.restarts},
          {"best_restart", m.best_restart}};
}

json to_json(std::span<cluster::cluster_stats const> stats) {
  json out = json::array();
  for (auto const& s : stats) {
    json outliers = json::array();
    for (auto const& o : s.outliers) {
      outliers.push_back({{"stop_id", o.stop_id}, {"count", o.count}});
    }
    out.push_back({{"cluster", s.cluster},
                   {"count", s.size},
                   {"min", s.min},
                   {"q1", s.q1},
                   {"median", s.median},
                   {"q3", s.q3},
                   {"max", s.max},
                   {"outliers", std::move(outliers)}});
  }
  return out;
}

json to_json(std::span<cluster::k_selection_row const> rows) {
  json out = json::array();
  for (auto const& r : rows) {
    out.push_back({{"k", r.k},
                   {"inertia", r.inertia},
                   {"min_cluster_size", r.min_cluster_size},
                   {"silhouette", r.silhouette.has_value()
                                      ? json(*r.silhouette)
                                      : json(nullptr)}});
  }
  return out;
}

json emit_geojson(std::span<stop const> stops,
                  std::span<usage::stop_usage const> usage,
                  std::span<cluster::stop_cluster_row const> table) {
  if (usage.size() != stops.size() || table.size() != stops.size()) {
    throw consistency_error{"stop, usage and cluster tables differ in size"};
  }
  json features = json::array();
  for (auto i = 0U; i < stops.size(); ++i) {
    auto const& s = stops[i];
    if (usage[i].stop_id != s.stop_id || table[i].stop_id != s.stop_id) {
      throw consistency_error{"stop_id mismatch at row " + std::to_string(i) +
                              " (" + s.stop_id + ")"};
    }
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "Point"}, {"coordinates", {s.longitude, s.latitude}}}},
         {"properties",
          {{"stop_id", s.stop_id},
           {"name", s.name},
           {"vehicle_count", usage[i].vehicle_count},
           {"cluster", table[i].cluster}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

}  // namespace stopscape::report
