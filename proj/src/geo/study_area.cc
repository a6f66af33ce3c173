#include "stopscape/geo/study_area.h"

#include <algorithm>
#include <cmath>

#include "stopscape/error.h"

namespace stopscape::geo {

namespace {

double cross(projected_point const& o, projected_point const& a,
             projected_point const& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::string_view to_string(area_method m) {
  return m == area_method::convex_hull ? "convex_hull" : "bounding_box";
}

area_method parse_area_method(std::string_view s) {
  if (s == "hull" || s == "convex_hull") {
    return area_method::convex_hull;
  }
  if (s == "bbox" || s == "bounding_box") {
    return area_method::bounding_box;
  }
  throw domain_error{"unknown area method '" + std::string{s} +
                     "' (expected hull or bbox)"};
}

std::vector<projected_point> convex_hull(std::span<projected_point const> in) {
  std::vector<projected_point> pts{in.begin(), in.end()};
  std::sort(begin(pts), end(pts), [](auto const& a, auto const& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(begin(pts), end(pts),
                        [](auto const& a, auto const& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            end(pts));
  if (pts.size() < 3) {
    return pts;
  }

  std::vector<projected_point> hull(2 * pts.size());
  std::size_t k = 0;
  for (auto const& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) {
      --k;
    }
    hull[k++] = p;
  }
  for (auto i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);  // last point repeats the first
  return hull;
}

double polygon_area(std::span<projected_point const> poly) {
  if (poly.size() < 3) {
    return 0.0;
  }
  // Shift to the first vertex to limit cancellation on large coordinates.
  auto const& o = poly.front();
  auto twice = 0.0;
  for (auto i = 1U; i + 1 < poly.size(); ++i) {
    twice += cross(o, poly[i], poly[i + 1]);
  }
  return std::abs(twice) / 2.0;
}

study_area compute_study_area(std::span<projected_point const> pts,
                              area_method method) {
  study_area out{method, 0.0, pts.size(), 0.0};
  if (method == area_method::convex_hull) {
    if (pts.size() < 3) {
      throw degenerate_geometry_error{
          "convex hull area needs at least 3 points"};
    }
    out.area = polygon_area(convex_hull(pts));
  } else {
    if (pts.size() < 2) {
      throw degenerate_geometry_error{
          "bounding box area needs at least 2 points"};
    }
    auto const [min_x, max_x] = std::minmax_element(
        begin(pts), end(pts), [](auto& a, auto& b) { return a.x < b.x; });
    auto const [min_y, max_y] = std::minmax_element(
        begin(pts), end(pts), [](auto& a, auto& b) { return a.y < b.y; });
    out.area = (max_x->x - min_x->x) * (max_y->y - min_y->y);
  }
  if (!(out.area > 0.0) || !std::isfinite(out.area)) {
    throw degenerate_geometry_error{
        "study area is zero: points are identical or collinear"};
  }
  out.density = static_cast<double>(out.point_count) / out.area;
  return out;
}

}  // namespace stopscape::geo
