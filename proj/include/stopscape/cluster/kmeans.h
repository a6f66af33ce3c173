#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stopscape/cluster/features.h"

namespace stopscape::cluster {

struct kmeans_options {
  std::size_t k{4};
  std::uint64_t seed{42};
  std::size_t restarts{20};
  std::size_t max_iterations{300};
  double tolerance{1e-6};  // max centroid movement, standardized units

  // Called with (restart, objective) after every assignment step and every
  // centroid update, in order. Lloyd guarantees a non-increasing sequence.
  std::function<void(std::size_t, double)> on_step;
};

struct cluster_model {
  std::size_t k{0};
  feature_matrix centroids;              // k x d
  std::vector<std::size_t> assignments;  // cluster index per row
  double inertia{0.0};
  std::size_t iterations{0};
  std::uint64_t seed{0};
  std::size_t restarts{0};
  std::size_t best_restart{0};

  std::vector<std::size_t> cluster_sizes() const;
};

// Sum of squared distances from each row to its assigned centroid.
double objective(feature_matrix const& x, feature_matrix const& centroids,
                 std::span<std::size_t const> assignments);

// Lloyd iterations from the given initial centroids. An empty cluster takes
// the point farthest from its own centroid (among clusters with more than one
// member). The returned centroids are the means of the returned assignment.
cluster_model lloyd(feature_matrix const& x, feature_matrix initial,
                    std::size_t max_iterations, double tolerance,
                    std::function<void(double)> const& on_step = {});

// k-means++ seeding; restart r draws from a generator seeded with (seed, r).
feature_matrix kmeans_plus_plus(feature_matrix const& x, std::size_t k,
                                std::uint64_t seed, std::size_t restart);

// Best of `restarts` k-means++-seeded Lloyd runs by (inertia, restart index).
// Deterministic in (x, options). Throws domain_error unless 1 <= k <= rows
// and restarts >= 1.
cluster_model kmeans(feature_matrix const& x, kmeans_options const&);
cluster_model kmeans(standardized_features const&, kmeans_options const&);

}  // namespace stopscape::cluster
