#include "stopscape/cluster/kmeans.h"

#include <cmath>
#include <limits>
#include <random>

#include "stopscape/error.h"

namespace stopscape::cluster {

namespace {

// Portable uniform draw in [0, 1); std distributions are implementation
// defined, the engine and seed_seq are not.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t nearest_centroid(std::span<double const> row,
                             feature_matrix const& c, double& best_d2) {
  std::size_t best = 0;
  best_d2 = std::numeric_limits<double>::infinity();
  for (auto j = 0U; j < c.rows(); ++j) {
    auto const d2 = squared_distance(row, c.row(j));
    if (d2 < best_d2) {
      best_d2 = d2;
      best = j;
    }
  }
  return best;
}

void repair_empty_clusters(feature_matrix const& x, feature_matrix& c,
                           std::vector<std::size_t>& assignment) {
  auto const k = c.rows();
  std::vector<std::size_t> sizes(k, 0);
  for (auto const a : assignment) {
    ++sizes[a];
  }
  for (auto empty = 0U; empty < k; ++empty) {
    if (sizes[empty] != 0) {
      continue;
    }
    auto far = std::numeric_limits<std::size_t>::max();
    auto far_d2 = -1.0;
    for (auto i = 0U; i < x.rows(); ++i) {
      if (sizes[assignment[i]] < 2) {
        continue;
      }
      auto const d2 = squared_distance(x.row(i), c.row(assignment[i]));
      if (d2 > far_d2) {
        far_d2 = d2;
        far = i;
      }
    }
    if (far == std::numeric_limits<std::size_t>::max()) {
      throw domain_error{"cannot repair empty cluster: k exceeds rows"};
    }
    --sizes[assignment[far]];
    assignment[far] = empty;
    sizes[empty] = 1;
    auto const src = x.row(far);
    std::copy(begin(src), end(src), c.row(empty).begin());
  }
}

void update_centroids(feature_matrix const& x,
                      std::vector<std::size_t> const& assignment,
                      feature_matrix& c) {
  std::vector<std::size_t> sizes(c.rows(), 0);
  feature_matrix sums{c.rows(), c.cols()};
  for (auto i = 0U; i < x.rows(); ++i) {
    auto const a = assignment[i];
    ++sizes[a];
    auto const r = x.row(i);
    auto s = sums.row(a);
    for (auto j = 0U; j < r.size(); ++j) {
      s[j] += r[j];
    }
  }
  for (auto a = 0U; a < c.rows(); ++a) {
    auto const n = static_cast<double>(sizes[a]);
    for (auto j = 0U; j < c.cols(); ++j) {
      c(a, j) = sums(a, j) / n;
    }
  }
}

}  // namespace

std::vector<std::size_t> cluster_model::cluster_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto const a : assignments) {
    ++sizes[a];
  }
  return sizes;
}

double objective(feature_matrix const& x, feature_matrix const& centroids,
                 std::span<std::size_t const> assignments) {
  auto total = 0.0;
  for (auto i = 0U; i < x.rows(); ++i) {
    total += squared_distance(x.row(i), centroids.row(assignments[i]));
  }
  return total;
}

cluster_model lloyd(feature_matrix const& x, feature_matrix c,
                    std::size_t max_iterations, double tolerance,
                    std::function<void(double)> const& on_step) {
  auto const k = c.rows();
  if (k == 0 || k > x.rows()) {
    throw domain_error{"k must lie in [1, rows]"};
  }
  if (c.cols() != x.cols()) {
    throw domain_error{"centroid dimension differs from feature dimension"};
  }
  auto const step = [&](double j) {
    if (on_step) {
      on_step(j);
    }
  };

  cluster_model m;
  m.k = k;
  m.assignments.assign(x.rows(), 0);
  auto const iterations = std::max<std::size_t>(max_iterations, 1);
  for (auto it = 0U; it < iterations; ++it) {
    for (auto i = 0U; i < x.rows(); ++i) {
      double d2;
      m.assignments[i] = nearest_centroid(x.row(i), c, d2);
    }
    repair_empty_clusters(x, c, m.assignments);
    step(objective(x, c, m.assignments));

    auto const previous = c;
    update_centroids(x, m.assignments, c);
    step(objective(x, c, m.assignments));
    m.iterations = it + 1;

    auto movement = 0.0;
    for (auto a = 0U; a < k; ++a) {
      movement = std::max(movement,
                          std::sqrt(squared_distance(c.row(a), previous.row(a))));
    }
    if (movement < tolerance) {
      break;
    }
  }
  m.centroids = std::move(c);
  m.inertia = objective(x, m.centroids, m.assignments);
  return m;
}

feature_matrix kmeans_plus_plus(feature_matrix const& x, std::size_t k,
                                std::uint64_t seed, std::size_t restart) {
  auto const n = x.rows();
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng{seq};

  feature_matrix c{k, x.cols()};
  auto const pick = [&](std::size_t slot, std::size_t i) {
    auto const r = x.row(i);
    std::copy(begin(r), end(r), c.row(slot).begin());
  };
  auto const uniform_index = [&] {
    return std::min(static_cast<std::size_t>(uniform01(rng) *
                                             static_cast<double>(n)),
                    n - 1);
  };

  pick(0, uniform_index());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  for (auto slot = 1U; slot < k; ++slot) {
    auto total = 0.0;
    for (auto i = 0U; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(x.row(i), c.row(slot - 1)));
      total += d2[i];
    }
    if (!(total > 0.0)) {
      pick(slot, uniform_index());
      continue;
    }
    auto const target = uniform01(rng) * total;
    auto chosen = n - 1;
    auto acc = 0.0;
    for (auto i = 0U; i < n; ++i) {
      acc += d2[i];
      if (acc > target && d2[i] > 0.0) {
        chosen = i;
        break;
      }
    }
    pick(slot, chosen);
  }
  return c;
}

cluster_model kmeans(feature_matrix const& x, kmeans_options const& opt) {
  if (opt.k == 0 || opt.k > x.rows()) {
    throw domain_error{"k = " + std::to_string(opt.k) +
                       " outside [1, " + std::to_string(x.rows()) + "]"};
  }
  if (opt.restarts == 0) {
    throw domain_error{"k-means needs at least one restart"};
  }
  cluster_model best;
  for (auto r = 0U; r < opt.restarts; ++r) {
    auto m = lloyd(x, kmeans_plus_plus(x, opt.k, opt.seed, r),
                   opt.max_iterations, opt.tolerance, [&](double j) {
                     if (opt.on_step) {
                       opt.on_step(r, j);
                     }
                   });
    if (r == 0 || m.inertia < best.inertia) {
      best = std::move(m);
      best.best_restart = r;
    }
  }
  best.seed = opt.seed;
  best.restarts = opt.restarts;
  return best;
}

cluster_model kmeans(standardized_features const& f,
                     kmeans_options const& opt) {
  return kmeans(f.matrix, opt);
}

}  // namespace stopscape::cluster
