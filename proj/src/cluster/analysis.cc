#include "stopscape/cluster/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "stopscape/error.h"
#include "stopscape/geo/projection.h"

namespace stopscape::cluster {

stop_clustering cluster_stops(std::span<stop const> stops,
                              std::span<usage::stop_usage const> usage,
                              cluster_stops_options const& opt) {
  auto const counts = usage::counts_for(stops, usage);
  feature_matrix raw{stops.size(), 3};
  std::vector<std::string> ids;
  ids.reserve(stops.size());

  std::optional<geo::local_projection> proj;
  if (opt.project_features && !stops.empty()) {
    std::vector<lat_lon> coords;
    for (auto const& s : stops) {
      coords.push_back(s.position());
    }
    proj = geo::local_projection::centered_on(coords);
  }
  for (auto i = 0U; i < stops.size(); ++i) {
    auto const& s = stops[i];
    if (proj) {
      auto const p = proj->project(s.position());
      raw(i, 0) = p.y;
      raw(i, 1) = p.x;
    } else {
      raw(i, 0) = s.latitude;
      raw(i, 1) = s.longitude;
    }
    raw(i, 2) = counts[i];
    ids.push_back(s.stop_id);
  }

  stop_clustering out;
  out.features = zscore(raw, std::move(ids));
  out.model = kmeans(out.features, opt.kmeans);
  out.table.reserve(stops.size());
  for (auto i = 0U; i < stops.size(); ++i) {
    out.table.push_back({stops[i].stop_id, stops[i].latitude,
                         stops[i].longitude,
                         static_cast<std::size_t>(counts[i]),
                         out.model.assignments[i]});
  }
  return out;
}

std::optional<double> mean_silhouette(feature_matrix const& x,
                                      std::span<std::size_t const> assignments,
                                      std::size_t k) {
  if (k < 2 || x.rows() < 2) {
    return std::nullopt;
  }
  std::vector<std::size_t> sizes(k, 0);
  for (auto const a : assignments) {
    ++sizes[a];
  }
  auto total = 0.0;
  std::vector<double> dist_sum(k);
  for (auto i = 0U; i < x.rows(); ++i) {
    std::fill(begin(dist_sum), end(dist_sum), 0.0);
    for (auto j = 0U; j < x.rows(); ++j) {
      if (i != j) {
        dist_sum[assignments[j]] +=
            std::sqrt(squared_distance(x.row(i), x.row(j)));
      }
    }
    auto const own = assignments[i];
    if (sizes[own] < 2) {
      continue;  // s(i) = 0
    }
    auto const a = dist_sum[own] / static_cast<double>(sizes[own] - 1);
    auto b = std::numeric_limits<double>::infinity();
    for (auto c = 0U; c < k; ++c) {
      if (c != own && sizes[c] != 0) {
        b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
      }
    }
    auto const denom = std::max(a, b);
    if (std::isfinite(b) && denom > 0.0) {
      total += (b - a) / denom;
    }
  }
  return total / static_cast<double>(x.rows());
}

namespace {

// Appends the point farthest from its nearest centroid until `k` centroids
// exist.
feature_matrix grow_centroids(feature_matrix const& x,
                              feature_matrix const& centroids, std::size_t k) {
  feature_matrix out{k, x.cols()};
  for (auto a = 0U; a < centroids.rows(); ++a) {
    auto const r = centroids.row(a);
    std::copy(begin(r), end(r), out.row(a).begin());
  }
  for (auto slot = centroids.rows(); slot < k; ++slot) {
    auto far = 0U;
    auto far_d2 = -1.0;
    for (auto i = 0U; i < x.rows(); ++i) {
      auto d2 = std::numeric_limits<double>::infinity();
      for (auto a = 0U; a < slot; ++a) {
        d2 = std::min(d2, squared_distance(x.row(i), out.row(a)));
      }
      if (d2 > far_d2) {
        far_d2 = d2;
        far = i;
      }
    }
    auto const r = x.row(far);
    std::copy(begin(r), end(r), out.row(slot).begin());
  }
  return out;
}

}  // namespace

std::vector<k_selection_row> k_selection_report(
    feature_matrix const& x, std::span<std::size_t const> k_values,
    kmeans_options const& opt) {
  std::vector<std::size_t> sorted{k_values.begin(), k_values.end()};
  std::sort(begin(sorted), end(sorted));
  sorted.erase(std::unique(begin(sorted), end(sorted)), end(sorted));

  std::map<std::size_t, cluster_model> models;
  cluster_model const* previous = nullptr;
  for (auto const k : sorted) {
    auto o = opt;
    o.k = k;
    auto m = kmeans(x, o);
    if (previous != nullptr && m.inertia > previous->inertia) {
      auto grown =
          lloyd(x, grow_centroids(x, previous->centroids, k),
                opt.max_iterations, opt.tolerance);
      if (grown.inertia < m.inertia) {
        grown.seed = m.seed;
        grown.restarts = m.restarts;
        m = std::move(grown);
      }
    }
    previous = &(models[k] = std::move(m));
  }

  std::vector<k_selection_row> rows;
  rows.reserve(k_values.size());
  for (auto const k : k_values) {
    auto const& m = models.at(k);
    auto const sizes = m.cluster_sizes();
    rows.push_back({k, m.inertia, *std::min_element(begin(sizes), end(sizes)),
                    mean_silhouette(x, m.assignments, k)});
  }
  return rows;
}

double quantile(std::span<double const> sorted, double p) {
  if (sorted.empty()) {
    throw domain_error{"quantile of an empty sample"};
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw domain_error{"quantile probability outside [0, 1]"};
  }
  auto const pos = p * static_cast<double>(sorted.size() - 1);
  auto const lo = static_cast<std::size_t>(std::floor(pos));
  auto const hi = std::min(lo + 1, sorted.size() - 1);
  auto const frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<cluster_stats> cluster_summary(
    cluster_model const& model, std::span<stop_cluster_row const> table) {
  std::vector<std::vector<stop_cluster_row const*>> members(model.k);
  for (auto const& row : table) {
    if (row.cluster >= model.k) {
      throw consistency_error{"stop " + row.stop_id +
                              " assigned to an unknown cluster"};
    }
    members[row.cluster].push_back(&row);
  }
  std::vector<cluster_stats> out;
  out.reserve(model.k);
  for (auto c = 0U; c < model.k; ++c) {
    cluster_stats s;
    s.cluster = c;
    s.size = members[c].size();
    if (s.size == 0) {
      out.push_back(std::move(s));
      continue;
    }
    std::vector<double> values;
    values.reserve(s.size);
    for (auto const* r : members[c]) {
      values.push_back(static_cast<double>(r->count));
    }
    std::sort(begin(values), end(values));
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    auto const iqr = s.q3 - s.q1;
    auto const lo = s.q1 - 1.5 * iqr;
    auto const hi = s.q3 + 1.5 * iqr;
    for (auto const* r : members[c]) {
      auto const v = static_cast<double>(r->count);
      if (v < lo || v > hi) {
        s.outliers.push_back({r->stop_id, r->count});
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

double adjusted_rand_index(std::span<std::size_t const> a,
                           std::span<std::size_t const> b) {
  if (a.size() != b.size()) {
    throw domain_error{"partitions differ in length"};
  }
  auto const n = a.size();
  if (n < 2) {
    return 1.0;
  }
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::map<std::size_t, double> rows, cols;
  for (auto i = 0U; i < n; ++i) {
    joint[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto const pairs = [](double m) { return m * (m - 1.0) / 2.0; };
  auto index = 0.0;
  for (auto const& [_, m] : joint) {
    index += pairs(m);
  }
  auto sum_a = 0.0;
  for (auto const& [_, m] : rows) {
    sum_a += pairs(m);
  }
  auto sum_b = 0.0;
  for (auto const& [_, m] : cols) {
    sum_b += pairs(m);
  }
  auto const expected = sum_a * sum_b / pairs(static_cast<double>(n));
  auto const max_index = (sum_a + sum_b) / 2.0;
  if (max_index == expected) {
    return 1.0;  // both partitions trivial (all singletons or one block)
  }
  return (index - expected) / (max_index - expected);
}

}  // namespace stopscape::cluster
