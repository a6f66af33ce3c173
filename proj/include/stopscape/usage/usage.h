#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stopscape/geo/projection.h"
#include "stopscape/ingest/observation.h"

namespace stopscape::usage {

struct stop_usage {
  std::string stop_id;
  std::size_t vehicle_count{0};

  friend bool operator==(stop_usage const&, stop_usage const&) = default;
};

struct assign_options {
  // Observations farther than this from every stop stay unassigned. Unlimited
  // by default.
  std::optional<double> max_assign_distance;
};

// One row per stop, in stop order, zero counts included. Each observation adds
// one to its nearest stop (ties to the smallest stop_id). Throws domain_error
// for an empty stop set.
std::vector<stop_usage> assign_vehicles_to_stops(
    std::span<vehicle_observation const>, std::span<stop const>,
    geo::local_projection const&, assign_options const& = {});

// Same, projecting around the stop centroid.
std::vector<stop_usage> assign_vehicles_to_stops(
    std::span<vehicle_observation const>, std::span<stop const>,
    assign_options const& = {});

struct service_count {
  std::string service_name;
  std::size_t count{0};

  friend bool operator==(service_count const&, service_count const&) = default;
};

// Counts per service_name, descending; equal counts in ascending string order
// ("16" before "3"). Truncated to top_k (0 keeps everything).
std::vector<service_count> service_frequency_table(
    std::span<vehicle_observation const>, std::size_t top_k);

// CSV `stop_id,vehicle_count` with a header row.
void write_usage_csv(std::filesystem::path const&,
                     std::span<stop_usage const>);
std::vector<stop_usage> read_usage_csv(std::filesystem::path const&);

// CSV `service_name,count` with a header row.
void write_services_csv(std::filesystem::path const&,
                        std::span<service_count const>);

// Per-stop counts aligned with `stops`. Throws consistency_error if a stop is
// missing from `usage` or `usage` names an unknown stop.
std::vector<double> counts_for(std::span<stop const> stops,
                               std::span<stop_usage const> usage);

}  // namespace stopscape::usage
