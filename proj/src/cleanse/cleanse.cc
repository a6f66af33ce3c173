#include "stopscape/cleanse/cleanse.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"

#include "json_fields.h"
#include "stopscape/error.h"
#include "stopscape/geo/projection.h"

namespace stopscape::cleanse {

using nlohmann::json;

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(begin(a), end(a), begin(b), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool present(std::optional<std::string> const& s) {
  return s.has_value() && !s->empty();
}

template <typename Pred>
filtered keep_if(std::vector<vehicle_observation> in, Pred&& pred) {
  auto const before = in.size();
  auto const last = std::stable_partition(begin(in), end(in), pred);
  in.erase(last, end(in));
  return {std::move(in), before - in.size()};
}

vehicle_observation const& observation_of(vehicle_observation const& o) {
  return o;
}
vehicle_observation const& observation_of(snapshot_record const& r) {
  return r.observation;
}

template <typename Record>
cleansed<Record> cleanse_records(std::vector<Record> in,
                                 std::span<depot_zone const> zones) {
  for (auto const& z : zones) {
    validate(z);
  }
  cleansed<Record> out;
  auto& rep = out.report;
  rep.input_count = in.size();
  out.kept.reserve(in.size());
  for (auto& rec : in) {
    auto const& o = observation_of(rec);
    if (!has_heading(o)) {
      ++rep.removed_null_heading;
    } else if (!outside_depots(o, zones)) {
      ++rep.removed_depot;
    } else if (!has_active_route(o)) {
      ++rep.removed_inactive_route;
    } else if (!is_in_service(o)) {
      ++rep.removed_unserviced;
    } else {
      out.kept.emplace_back(std::move(rec));
    }
  }
  rep.output_count = out.kept.size();
  return out;
}

}  // namespace

void validate(depot_zone const& z) {
  if (!(z.radius > 0.0)) {
    throw domain_error{"depot zone '" + z.name + "' has non-positive radius"};
  }
  if (!is_valid_wgs84({z.center_latitude, z.center_longitude})) {
    throw domain_error{"depot zone '" + z.name +
                       "' centre outside WGS84 bounds"};
  }
}

std::vector<depot_zone> parse_depot_zones(std::string_view geojson,
                                          double default_radius) {
  json doc;
  try {
    doc = json::parse(geojson);
  } catch (json::parse_error const& e) {
    throw parse_error{std::string{"malformed depot GeoJSON: "} + e.what(),
                      e.byte};
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw parse_error{"depot file is not a GeoJSON FeatureCollection", 0};
  }
  std::vector<depot_zone> zones;
  for (auto const& f : doc["features"]) {
    auto const* geom = f.is_object() ? detail::field(f, "geometry") : nullptr;
    if (geom == nullptr || geom->value("type", "") != "Point" ||
        !geom->contains("coordinates") ||
        !(*geom)["coordinates"].is_array() ||
        (*geom)["coordinates"].size() < 2) {
      throw parse_error{"depot feature without Point geometry", 0};
    }
    auto const& c = (*geom)["coordinates"];
    depot_zone z;
    z.center_longitude = c[0].get<double>();
    z.center_latitude = c[1].get<double>();
    z.radius = default_radius;
    if (auto const* props = detail::field(f, "properties");
        props != nullptr && props->is_object()) {
      z.name = detail::optional_identifier(*props, "name").value_or("");
      z.radius =
          detail::optional_number(*props, "radius").value_or(default_radius);
    }
    validate(z);
    zones.push_back(std::move(z));
  }
  return zones;
}

std::vector<depot_zone> read_depot_zones(std::filesystem::path const& p,
                                         double default_radius) {
  std::ifstream in{p, std::ios::binary};
  if (!in) {
    throw domain_error{"cannot open depot file " + p.string()};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_depot_zones(ss.str(), default_radius);
}

bool has_heading(vehicle_observation const& o) { return o.heading.has_value(); }

bool outside_depots(vehicle_observation const& o,
                    std::span<depot_zone const> zones) {
  return std::none_of(begin(zones), end(zones), [&](depot_zone const& z) {
    return geo::haversine(o.position(),
                          {z.center_latitude, z.center_longitude}) <= z.radius;
  });
}

bool has_active_route(vehicle_observation const& o) {
  return present(o.next_stop) && present(o.destination);
}

bool is_in_service(vehicle_observation const& o) {
  if (!present(o.service_name) || iequals(*o.service_name, "N/A")) {
    return false;
  }
  return !(o.destination.has_value() &&
           iequals(*o.destination, "Not in Service"));
}

filtered filter_inactive_vehicles(std::vector<vehicle_observation> in) {
  return keep_if(std::move(in), has_heading);
}

filtered filter_depots(std::vector<vehicle_observation> in,
                       std::span<depot_zone const> zones) {
  for (auto const& z : zones) {
    validate(z);
  }
  return keep_if(std::move(in),
                 [&](auto const& o) { return outside_depots(o, zones); });
}

filtered filter_inactive_routes(std::vector<vehicle_observation> in) {
  return keep_if(std::move(in), has_active_route);
}

filtered filter_unserviced(std::vector<vehicle_observation> in) {
  return keep_if(std::move(in), is_in_service);
}

cleansed<vehicle_observation> cleanse(std::vector<vehicle_observation> in,
                                      std::span<depot_zone const> zones) {
  return cleanse_records(std::move(in), zones);
}

cleansed<snapshot_record> cleanse(std::vector<snapshot_record> in,
                                  std::span<depot_zone const> zones) {
  return cleanse_records(std::move(in), zones);
}

}  // namespace stopscape::cleanse
