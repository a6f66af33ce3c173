#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "stopscape/geo/projection.h"

namespace stopscape::geo {

// Static 2-d tree over a point set. Queries are const and may run
// concurrently.
class kd_tree {
public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  kd_tree() = default;
  explicit kd_tree(std::span<projected_point const>);

  struct hit {
    std::size_t index{npos};
    double squared_distance{std::numeric_limits<double>::infinity()};
  };

  // Nearest point to (x, y) other than `exclude`. Among equidistant points the
  // one with the smallest `rank[index]` wins (index order if `rank` is empty).
  hit nearest(double x, double y, std::size_t exclude = npos,
              std::span<std::size_t const> rank = {}) const;

  std::size_t size() const { return xs_.size(); }

private:
  void build(std::size_t lo, std::size_t hi, int depth);
  void search(std::size_t lo, std::size_t hi, double x, double y,
              std::size_t exclude, std::span<std::size_t const> rank,
              hit& best) const;

  std::vector<double> xs_, ys_;
  std::vector<std::size_t> order_;  // point indices in tree layout
  std::vector<std::uint8_t> axis_;  // split axis of the node at each mid slot
};

// Squared Euclidean distance; the single formula shared by every NN routine so
// indexed and exhaustive searches agree bit for bit.
inline double squared_distance(double ax, double ay, double bx, double by) {
  auto const dx = ax - bx;
  auto const dy = ay - by;
  return dx * dx + dy * dy;
}

// Distance from each point to its nearest other point. Uses the 2-d tree for
// 256 points and above, an exhaustive scan below. Throws domain_error for
// fewer than two points.
std::vector<double> nearest_neighbor_distances(
    std::span<projected_point const>);

std::vector<double> nearest_neighbor_distances_brute_force(
    std::span<projected_point const>);

}  // namespace stopscape::geo
