#pragma once

#include <span>
#include <string>
#include <vector>

#include "stopscape/geo/kd_tree.h"
#include "stopscape/geo/projection.h"
#include "stopscape/ingest/observation.h"

namespace stopscape::geo {

// Projected stop set with a nearest-stop query. Equidistant stops resolve to
// the lexicographically smallest stop_id.
class stop_index {
public:
  // Throws domain_error if `stops` is empty.
  stop_index(std::span<stop const> stops, local_projection const&);

  struct match {
    std::size_t position;  // index into the stop list given at construction
    double distance;       // metres, in projected space
  };

  match nearest(projected_point const&) const;

  std::string const& stop_id(std::size_t position) const {
    return ids_[position];
  }
  std::vector<projected_point> const& points() const { return points_; }
  std::size_t size() const { return ids_.size(); }

private:
  std::vector<std::string> ids_;
  std::vector<projected_point> points_;
  std::vector<std::size_t> rank_;  // lexicographic rank of ids_
  kd_tree tree_;
};

std::string const& nearest_stop(projected_point const&, stop_index const&);

}  // namespace stopscape::geo
