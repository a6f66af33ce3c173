#include "stopscape/geo/kd_tree.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stopscape/error.h"

namespace stopscape::geo {

namespace {

constexpr std::size_t leaf_size = 8;
constexpr std::size_t exhaustive_below = 256;

bool better(kd_tree::hit const& best, std::size_t idx, double d2,
            std::span<std::size_t const> rank) {
  if (d2 != best.squared_distance) {
    return d2 < best.squared_distance;
  }
  if (best.index == kd_tree::npos) {
    return true;
  }
  return rank.empty() ? idx < best.index : rank[idx] < rank[best.index];
}

}  // namespace

kd_tree::kd_tree(std::span<projected_point const> pts)
    : order_(pts.size()), axis_(pts.size(), 0) {
  xs_.reserve(pts.size());
  ys_.reserve(pts.size());
  for (auto const& p : pts) {
    xs_.push_back(p.x);
    ys_.push_back(p.y);
  }
  std::iota(begin(order_), end(order_), std::size_t{0});
  build(0, order_.size(), 0);
}

void kd_tree::build(std::size_t lo, std::size_t hi, int depth) {
  if (hi - lo <= leaf_size) {
    return;
  }
  auto const mid = lo + (hi - lo) / 2;
  auto const axis = static_cast<std::uint8_t>(depth % 2);
  auto const& coord = axis == 0 ? xs_ : ys_;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(lo),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(hi),
                   [&](auto a, auto b) { return coord[a] < coord[b]; });
  axis_[mid] = axis;
  build(lo, mid, depth + 1);
  build(mid + 1, hi, depth + 1);
}

void kd_tree::search(std::size_t lo, std::size_t hi, double x, double y,
                     std::size_t exclude, std::span<std::size_t const> rank,
                     hit& best) const {
  if (hi - lo <= leaf_size) {
    for (auto i = lo; i < hi; ++i) {
      auto const idx = order_[i];
      if (idx == exclude) {
        continue;
      }
      auto const d2 = squared_distance(xs_[idx], ys_[idx], x, y);
      if (better(best, idx, d2, rank)) {
        best = {idx, d2};
      }
    }
    return;
  }

  auto const mid = lo + (hi - lo) / 2;
  auto const idx = order_[mid];
  if (idx != exclude) {
    auto const d2 = squared_distance(xs_[idx], ys_[idx], x, y);
    if (better(best, idx, d2, rank)) {
      best = {idx, d2};
    }
  }

  auto const split = axis_[mid] == 0 ? xs_[idx] : ys_[idx];
  auto const q = axis_[mid] == 0 ? x : y;
  auto const diff = q - split;
  auto const near_first = diff < 0.0;
  if (near_first) {
    search(lo, mid, x, y, exclude, rank, best);
  } else {
    search(mid + 1, hi, x, y, exclude, rank, best);
  }
  // <= keeps equidistant candidates on the far side reachable for tie-breaks.
  if (diff * diff <= best.squared_distance) {
    if (near_first) {
      search(mid + 1, hi, x, y, exclude, rank, best);
    } else {
      search(lo, mid, x, y, exclude, rank, best);
    }
  }
}

kd_tree::hit kd_tree::nearest(double x, double y, std::size_t exclude,
                              std::span<std::size_t const> rank) const {
  hit best;
  if (!order_.empty()) {
    search(0, order_.size(), x, y, exclude, rank, best);
  }
  return best;
}

std::vector<double> nearest_neighbor_distances_brute_force(
    std::span<projected_point const> pts) {
  if (pts.size() < 2) {
    throw domain_error{"nearest-neighbour distances need at least 2 points"};
  }
  std::vector<double> out(pts.size(), std::numeric_limits<double>::infinity());
  for (auto i = 0U; i < pts.size(); ++i) {
    for (auto j = 0U; j < pts.size(); ++j) {
      if (i != j) {
        out[i] = std::min(
            out[i], squared_distance(pts[j].x, pts[j].y, pts[i].x, pts[i].y));
      }
    }
  }
  for (auto& d : out) {
    d = std::sqrt(d);
  }
  return out;
}

std::vector<double> nearest_neighbor_distances(
    std::span<projected_point const> pts) {
  if (pts.size() < exhaustive_below) {
    return nearest_neighbor_distances_brute_force(pts);
  }
  kd_tree const tree{pts};
  std::vector<double> out(pts.size());
  for (auto i = 0U; i < pts.size(); ++i) {
    out[i] = std::sqrt(tree.nearest(pts[i].x, pts[i].y, i).squared_distance);
  }
  return out;
}

}  // namespace stopscape::geo
