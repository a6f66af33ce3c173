#include "stopscape/geo/stop_index.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stopscape/error.h"

namespace stopscape::geo {

stop_index::stop_index(std::span<stop const> stops,
                       local_projection const& proj) {
  if (stops.empty()) {
    throw domain_error{"stop set is empty"};
  }
  ids_.reserve(stops.size());
  points_.reserve(stops.size());
  for (auto const& s : stops) {
    ids_.push_back(s.stop_id);
    points_.push_back(proj.project(s.position(), s.stop_id));
  }
  std::vector<std::size_t> by_id(ids_.size());
  std::iota(begin(by_id), end(by_id), std::size_t{0});
  std::sort(begin(by_id), end(by_id),
            [&](auto a, auto b) { return ids_[a] < ids_[b]; });
  rank_.resize(ids_.size());
  for (auto r = 0U; r < by_id.size(); ++r) {
    rank_[by_id[r]] = r;
  }
  tree_ = kd_tree{points_};
}

stop_index::match stop_index::nearest(projected_point const& p) const {
  auto const hit = tree_.nearest(p.x, p.y, kd_tree::npos, rank_);
  return {hit.index, std::sqrt(hit.squared_distance)};
}

std::string const& nearest_stop(projected_point const& p,
                                stop_index const& index) {
  return index.stop_id(index.nearest(p).position);
}

}  // namespace stopscape::geo
