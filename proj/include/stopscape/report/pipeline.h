#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

#include "stopscape/geo/study_area.h"

namespace stopscape::report {

struct pipeline_config {
  std::string endpoint;  // feed base URL, echoed for provenance only
  std::filesystem::path snapshots;
  std::filesystem::path stops;
  std::optional<std::filesystem::path> depots;  // none: no depot filtering
  double depot_radius{250.0};
  std::optional<double> max_assign_distance;
  std::size_t top_services{10};
  geo::area_method area_method{geo::area_method::convex_hull};
  std::size_t histogram_bins{50};
  double alpha{0.01};
  double bandwidth{300.0};  // metres
  std::vector<double> sweep{100.0, 300.0, 500.0, 800.0, 1000.0};  // empty: no sweep
  std::size_t grid{256};
  std::size_t k{4};
  std::vector<std::size_t> k_range{2, 3, 4, 5, 6, 7, 8};
  std::uint64_t seed{42};
  std::size_t restarts{20};
  std::size_t max_iterations{300};
  double tolerance{1e-6};
  bool project_features{false};
  std::filesystem::path out_dir{"out"};
};

// Throws domain_error naming the first invalid field or missing input.
void validate(pipeline_config const&);

nlohmann::ordered_json to_json(pipeline_config const&);

struct stage_record {
  std::string name;
  std::vector<std::filesystem::path> outputs;
  double millis{0.0};
};

struct run_manifest {
  nlohmann::ordered_json config;
  std::vector<std::filesystem::path> inputs;
  std::vector<stage_record> stages;
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const;
};

// cleanse -> usage -> nna -> kde -> cluster over the stored snapshots. Writes
// every output plus `manifest.json` into out_dir. A failing stage raises
// stage_error and leaves completed outputs in place next to a `.partial`
// marker describing the failure.
run_manifest run_pipeline(pipeline_config const&);

}  // namespace stopscape::report
