#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "nlohmann/json.hpp"

#include "stopscape/cleanse/cleanse.h"
#include "stopscape/cluster/analysis.h"
#include "stopscape/geo/projection.h"
#include "stopscape/ingest/snapshot_store.h"
#include "stopscape/kde/kde.h"
#include "stopscape/nna/nna.h"
#include "stopscape/usage/usage.h"

namespace stopscape::report {

using json = nlohmann::ordered_json;

// Shortest round-trip decimal rendering.
std::string format_number(double);

void write_text(std::filesystem::path const&, std::string const&);
void write_json(std::filesystem::path const&, json const&);

json to_json(cleanse::cleanse_report const&);
json to_json(nna::nna_result const&);
json to_json(kde::grid_summary const&);

void write_snapshots(std::filesystem::path const&,
                     std::span<snapshot_record const>);

// Rows `cell_x_center,cell_y_center,density,intensity`, projected metres.
void write_density_csv(std::filesystem::path const&, kde::density_grid const&);

// Grid geometry, bandwidths and projection reference for a density CSV.
json density_metadata(kde::density_grid const&, geo::local_projection const&);

// Rows `stop_id,lat,lon,count,cluster`.
void write_cluster_csv(std::filesystem::path const&,
                       std::span<cluster::stop_cluster_row const>);

// Centroids in standardized and raw units, plus standardization parameters.
json cluster_model_json(cluster::stop_clustering const&);
json to_json(std::span<cluster::cluster_stats const>);
json to_json(std::span<cluster::k_selection_row const>);

// One Point feature per stop ([lon, lat]) with properties stop_id, name,
// vehicle_count, cluster. Throws consistency_error when the three tables do
// not describe the same stop set in the same order.
json emit_geojson(std::span<stop const>, std::span<usage::stop_usage const>,
                  std::span<cluster::stop_cluster_row const>);

}  // namespace stopscape::report
