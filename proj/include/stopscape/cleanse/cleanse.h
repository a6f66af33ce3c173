#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stopscape/ingest/observation.h"
#include "stopscape/ingest/snapshot_store.h"

namespace stopscape::cleanse {

inline constexpr double default_depot_radius_m = 250.0;

struct depot_zone {
  std::string name;
  double center_latitude{0.0};
  double center_longitude{0.0};
  double radius{default_depot_radius_m};  // metres
};

// Throws domain_error for a non-positive radius or invalid centre.
void validate(depot_zone const&);

// Reads a GeoJSON FeatureCollection of Point features. Each feature may carry
// `name` and `radius` (metres) properties; a missing radius takes
// `default_radius`. Throws parse_error or domain_error.
std::vector<depot_zone> read_depot_zones(
    std::filesystem::path const&,
    double default_radius = default_depot_radius_m);
std::vector<depot_zone> parse_depot_zones(
    std::string_view geojson, double default_radius = default_depot_radius_m);

// Single-record predicates; an observation survives a rule when its
// predicate holds.
bool has_heading(vehicle_observation const&);
bool outside_depots(vehicle_observation const&, std::span<depot_zone const>);
// Both next_stop and destination present and non-empty.
bool has_active_route(vehicle_observation const&);
// service_name present, non-empty, not "N/A"; destination not "Not in Service"
// (both case-insensitive).
bool is_in_service(vehicle_observation const&);

using filtered = std::pair<std::vector<vehicle_observation>, std::size_t>;

filtered filter_inactive_vehicles(std::vector<vehicle_observation>);
filtered filter_depots(std::vector<vehicle_observation>,
                       std::span<depot_zone const>);
filtered filter_inactive_routes(std::vector<vehicle_observation>);
filtered filter_unserviced(std::vector<vehicle_observation>);

struct cleanse_report {
  std::size_t input_count{0};
  std::size_t removed_null_heading{0};
  std::size_t removed_depot{0};
  std::size_t removed_inactive_route{0};
  std::size_t removed_unserviced{0};
  std::size_t output_count{0};

  std::size_t removed_total() const {
    return removed_null_heading + removed_depot + removed_inactive_route +
           removed_unserviced;
  }
  // output_count == input_count - removed_total()
  bool balanced() const { return output_count + removed_total() == input_count; }
};

template <typename Record>
struct cleansed {
  std::vector<Record> kept;
  cleanse_report report;
};

// Applies the rules in order: null heading, depot, inactive route, out of
// service. A record failing several rules is counted under the first. An
// empty zone list disables depot filtering.
cleansed<vehicle_observation> cleanse(std::vector<vehicle_observation>,
                                      std::span<depot_zone const>);
cleansed<snapshot_record> cleanse(std::vector<snapshot_record>,
                                  std::span<depot_zone const>);

}  // namespace stopscape::cleanse
