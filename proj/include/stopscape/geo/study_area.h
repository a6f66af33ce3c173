#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "stopscape/geo/projection.h"

namespace stopscape::geo {

enum class area_method { convex_hull, bounding_box };

std::string_view to_string(area_method);
// Accepts "hull"/"convex_hull" and "bbox"/"bounding_box".
area_method parse_area_method(std::string_view);

struct study_area {
  area_method method{area_method::convex_hull};
  double area{0.0};  // m^2
  std::size_t point_count{0};
  double density{0.0};  // points per m^2, point_count / area
};

// Hull vertices in counter-clockwise order, collinear points dropped
// (Andrew's monotone chain).
std::vector<projected_point> convex_hull(std::span<projected_point const>);

// Absolute shoelace area of a simple polygon given by its vertices in order.
double polygon_area(std::span<projected_point const>);

// Throws degenerate_geometry_error when the region has zero area (all points
// collinear or identical) or too few points.
study_area compute_study_area(std::span<projected_point const>, area_method);

}  // namespace stopscape::geo
