#include "stopscape/ingest/feed.h"

#include <cmath>
#include <unordered_set>

#include "nlohmann/json.hpp"

#include "stopscape/error.h"
#include "json_fields.h"
#include "stopscape/warnings.h"

namespace stopscape {

using nlohmann::json;

namespace {

json parse_document(std::string_view payload, char const* array_key) {
  json doc;
  try {
    doc = json::parse(payload);
  } catch (json::parse_error const& e) {
    throw parse_error{std::string{"malformed feed payload: "} + e.what(),
                      e.byte > 0 ? e.byte - 1 : 0};
  }
  if (!doc.is_object() || !doc.contains(array_key) ||
      !doc[array_key].is_array()) {
    throw parse_error{std::string{"feed payload has no '"} + array_key +
                          "' array",
                      0};
  }
  return doc;
}

std::optional<double> normalized_heading(json const& entry) {
  auto const h = detail::optional_number(entry, "heading");
  if (!h.has_value()) {
    return std::nullopt;
  }
  auto deg = std::fmod(*h, 360.0);
  if (deg < 0.0) {
    deg += 360.0;
  }
  return deg == 360.0 ? 0.0 : deg;
}

}  // namespace

std::vector<vehicle_observation> parse_vehicle_feed(std::string_view payload) {
  auto const doc = parse_document(payload, "vehicles");
  std::vector<vehicle_observation> out;
  out.reserve(doc["vehicles"].size());
  auto index = 0U;
  for (auto const& entry : doc["vehicles"]) {
    auto const position = index++;
    if (!entry.is_object()) {
      warn("vehicle entry " + std::to_string(position) + " is not an object");
      continue;
    }
    vehicle_observation o;
    auto const id = detail::optional_identifier(entry, "vehicle_id");
    auto const lat = detail::optional_number(entry, "latitude");
    auto const lon = detail::optional_number(entry, "longitude");
    auto const fix = detail::optional_number(entry, "last_gps_fix");
    if (!id || id->empty() || !lat || !lon || !fix) {
      warn("vehicle entry " + std::to_string(position) +
           " lacks vehicle_id, position or last_gps_fix; skipped");
      continue;
    }
    o.vehicle_id = *id;
    o.latitude = *lat;
    o.longitude = *lon;
    o.timestamp = static_cast<std::int64_t>(std::llround(*fix));
    o.heading = normalized_heading(entry);
    o.service_name = detail::optional_identifier(entry, "service_name");
    o.destination = detail::optional_identifier(entry, "destination");
    o.next_stop = detail::optional_identifier(entry, "next_stop");
    if (!o.next_stop) {
      o.next_stop = detail::optional_identifier(entry, "next_stop_id");
    }
    try {
      validate(o);
    } catch (domain_error const& e) {
      warn(std::string{"vehicle entry "} + std::to_string(position) + ": " +
           e.what() + "; skipped");
      continue;
    }
    out.emplace_back(std::move(o));
  }
  return out;
}

std::vector<stop> parse_stop_feed(std::string_view payload) {
  auto const doc = parse_document(payload, "stops");
  std::vector<stop> out;
  std::unordered_set<std::string> seen;
  auto index = 0U;
  for (auto const& entry : doc["stops"]) {
    auto const position = index++;
    if (!entry.is_object()) {
      warn("stop entry " + std::to_string(position) + " is not an object");
      continue;
    }
    auto const id = detail::optional_identifier(entry, "stop_id");
    auto const lat = detail::optional_number(entry, "latitude");
    auto const lon = detail::optional_number(entry, "longitude");
    if (!id || id->empty() || !lat || !lon) {
      warn("stop entry " + std::to_string(position) +
           " lacks stop_id or position; skipped");
      continue;
    }
    stop s{*id, detail::optional_identifier(entry, "name").value_or(""), *lat,
           *lon};
    try {
      validate(s);
    } catch (domain_error const& e) {
      warn(std::string{"stop entry "} + std::to_string(position) + ": " +
           e.what() + "; skipped");
      continue;
    }
    if (!seen.insert(s.stop_id).second) {
      warn("duplicate stop_id " + s.stop_id + " at entry " +
           std::to_string(position) + "; keeping first occurrence");
      continue;
    }
    out.emplace_back(std::move(s));
  }
  return out;
}

std::vector<vehicle_observation> fetch_vehicle_snapshot(
    std::string const& base_url, http_options const& opt) {
  return parse_vehicle_feed(http_get(base_url + "/vehicle_locations", opt));
}

std::vector<stop> fetch_stops(std::string const& base_url,
                              http_options const& opt) {
  return parse_stop_feed(http_get(base_url + "/stops", opt));
}

}  // namespace stopscape
