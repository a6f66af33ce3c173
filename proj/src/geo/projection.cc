#include "stopscape/geo/projection.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stopscape/error.h"
#include "stopscape/warnings.h"

namespace stopscape::geo {

namespace {

constexpr double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace

double haversine(lat_lon const& a, lat_lon const& b) {
  auto const phi1 = to_rad(a.lat);
  auto const phi2 = to_rad(b.lat);
  auto const dphi = phi2 - phi1;
  auto const dlambda = to_rad(b.lon - a.lon);
  auto const s_phi = std::sin(dphi / 2.0);
  auto const s_lambda = std::sin(dlambda / 2.0);
  auto const h =
      s_phi * s_phi + std::cos(phi1) * std::cos(phi2) * s_lambda * s_lambda;
  return 2.0 * earth_radius_m * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
}

local_projection::local_projection(lat_lon reference)
    : reference_{reference}, cos_ref_{std::cos(to_rad(reference.lat))} {
  if (!is_valid_wgs84(reference) || std::abs(reference.lat) >= 90.0) {
    throw domain_error{"projection reference outside usable WGS84 range"};
  }
}

local_projection local_projection::centered_on(std::span<lat_lon const> pts) {
  if (pts.empty()) {
    throw domain_error{"cannot centre a projection on zero points"};
  }
  auto lat = 0.0;
  auto lon = 0.0;
  for (auto const& p : pts) {
    lat += p.lat;
    lon += p.lon;
  }
  auto const n = static_cast<double>(pts.size());
  return local_projection{{lat / n, lon / n}};
}

projected_point local_projection::project(lat_lon const& p) const {
  if (!is_valid_wgs84(p)) {
    throw domain_error{"coordinates outside WGS84 bounds"};
  }
  if (std::abs(p.lat - reference_.lat) >= validity_range_deg) {
    warn("projected point lies more than 2 degrees of latitude from the "
         "projection reference");
  }
  return {earth_radius_m * to_rad(p.lon - reference_.lon) * cos_ref_,
          earth_radius_m * to_rad(p.lat - reference_.lat), std::nullopt};
}

projected_point local_projection::project(lat_lon const& p,
                                          std::string source_id) const {
  auto out = project(p);
  out.source_id = std::move(source_id);
  return out;
}

lat_lon local_projection::unproject(projected_point const& p) const {
  return {reference_.lat + to_deg(p.y / earth_radius_m),
          reference_.lon + to_deg(p.x / (earth_radius_m * cos_ref_))};
}

}  // namespace stopscape::geo
