#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace stopscape {

struct lat_lon {
  double lat{0.0};
  double lon{0.0};

  friend bool operator==(lat_lon const&, lat_lon const&) = default;
};

bool is_valid_wgs84(lat_lon const&);

// One live vehicle record from the feed. Optional fields are absent when the
// feed sends null or omits them.
struct vehicle_observation {
  std::string vehicle_id;
  std::optional<std::string> service_name;
  double latitude{0.0};
  double longitude{0.0};
  std::optional<double> heading;
  std::optional<std::string> destination;
  std::optional<std::string> next_stop;
  std::int64_t timestamp{0};  // UTC epoch seconds (last GPS fix)

  lat_lon position() const { return {latitude, longitude}; }

  friend bool operator==(vehicle_observation const&,
                         vehicle_observation const&) = default;
};

struct stop {
  std::string stop_id;
  std::string name;
  double latitude{0.0};
  double longitude{0.0};

  lat_lon position() const { return {latitude, longitude}; }

  friend bool operator==(stop const&, stop const&) = default;
};

// Throws domain_error describing the first violated invariant.
void validate(vehicle_observation const&);
void validate(stop const&);

}  // namespace stopscape
