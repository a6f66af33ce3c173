#pragma once

#include <optional>
#include <span>
#include <string>

#include "stopscape/ingest/observation.h"

namespace stopscape::geo {

inline constexpr double earth_radius_m = 6'371'000.0;

struct projected_point {
  double x{0.0};  // metres east of the reference
  double y{0.0};  // metres north of the reference
  std::optional<std::string> source_id;

  friend bool operator==(projected_point const&,
                         projected_point const&) = default;
};

// Great-circle distance on a sphere of radius earth_radius_m.
double haversine(lat_lon const& a, lat_lon const& b);

// Local equirectangular projection: x = R * dlon * cos(lat_ref), y = R * dlat.
// Accurate at city scale; points more than 2 degrees of latitude from the
// reference trigger a warning.
class local_projection {
public:
  static constexpr double validity_range_deg = 2.0;

  explicit local_projection(lat_lon reference);

  // Reference at the arithmetic mean of the given coordinates.
  static local_projection centered_on(std::span<lat_lon const>);

  // Throws domain_error for coordinates outside WGS84 bounds.
  projected_point project(lat_lon const&) const;
  projected_point project(lat_lon const&, std::string source_id) const;

  lat_lon unproject(projected_point const&) const;

  lat_lon const& reference() const { return reference_; }

private:
  lat_lon reference_;
  double cos_ref_;
};

}  // namespace stopscape::geo
