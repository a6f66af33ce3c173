#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stopscape/cluster/features.h"
#include "stopscape/cluster/kmeans.h"
#include "stopscape/ingest/observation.h"
#include "stopscape/usage/usage.h"

namespace stopscape::cluster {

struct stop_cluster_row {
  std::string stop_id;
  double lat{0.0};
  double lon{0.0};
  std::size_t count{0};
  std::size_t cluster{0};
};

struct stop_clustering {
  standardized_features features;
  cluster_model model;
  std::vector<stop_cluster_row> table;  // stop order
};

struct cluster_stops_options {
  kmeans_options kmeans;
  // Use projected metres instead of raw degrees for the two position features.
  bool project_features{false};
};

// Builds (lat, lon, vehicle_count) per stop, standardizes, and clusters.
// Throws consistency_error if `usage` does not cover exactly the stop set.
stop_clustering cluster_stops(std::span<stop const>,
                              std::span<usage::stop_usage const>,
                              cluster_stops_options const&);

// Mean silhouette in feature space; absent for k < 2. Singleton clusters
// contribute 0.
std::optional<double> mean_silhouette(feature_matrix const&,
                                      std::span<std::size_t const> assignments,
                                      std::size_t k);

struct k_selection_row {
  std::size_t k{0};
  double inertia{0.0};
  std::size_t min_cluster_size{0};
  std::optional<double> silhouette;
};

// One row per requested k (input order). Inertia is made non-increasing in k:
// if the best restart for k is worse than a smaller k's model, that model's
// centroids plus the farthest points seed an extra Lloyd run.
std::vector<k_selection_row> k_selection_report(
    feature_matrix const&, std::span<std::size_t const> k_values,
    kmeans_options const&);

struct outlier {
  std::string stop_id;
  std::size_t count{0};
};

struct cluster_stats {
  std::size_t cluster{0};
  std::size_t size{0};
  double min{0.0};
  double q1{0.0};
  double median{0.0};
  double q3{0.0};
  double max{0.0};
  std::vector<outlier> outliers;  // beyond [q1 - 1.5 IQR, q3 + 1.5 IQR]
};

// Linear-interpolation quantile (position (n - 1) p on the sorted sample).
// Throws domain_error on empty input or p outside [0, 1].
double quantile(std::span<double const> sorted, double p);

// Per-cluster activity distribution for boxplots.
std::vector<cluster_stats> cluster_summary(
    cluster_model const&, std::span<stop_cluster_row const>);

double adjusted_rand_index(std::span<std::size_t const> a,
                           std::span<std::size_t const> b);

}  // namespace stopscape::cluster
