#include "stopscape/ingest/observation.h"

#include <cmath>

#include "stopscape/error.h"

namespace stopscape {

bool is_valid_wgs84(lat_lon const& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

void validate(vehicle_observation const& o) {
  if (o.vehicle_id.empty()) {
    throw domain_error{"vehicle_id is empty"};
  }
  if (!is_valid_wgs84(o.position())) {
    throw domain_error{"vehicle " + o.vehicle_id +
                       ": coordinates outside WGS84 bounds"};
  }
  if (o.timestamp <= 0) {
    throw domain_error{"vehicle " + o.vehicle_id + ": non-positive timestamp"};
  }
  if (o.heading.has_value() &&
      !(*o.heading >= 0.0 && *o.heading < 360.0)) {
    throw domain_error{"vehicle " + o.vehicle_id + ": heading outside [0,360)"};
  }
}

void validate(stop const& s) {
  if (s.stop_id.empty()) {
    throw domain_error{"stop_id is empty"};
  }
  if (!is_valid_wgs84(s.position())) {
    throw domain_error{"stop " + s.stop_id +
                       ": coordinates outside WGS84 bounds"};
  }
}

}  // namespace stopscape
