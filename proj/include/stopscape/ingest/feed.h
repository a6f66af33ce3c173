#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stopscape/ingest/observation.h"

namespace stopscape {

// Parses a `GET /vehicle_locations` payload. Entries keep feed order; null and
// missing optional fields both map to an absent optional. Entries lacking a
// usable vehicle_id, position, or last_gps_fix are skipped with a warning.
// Throws parse_error on malformed JSON or a payload without a `vehicles` array.
std::vector<vehicle_observation> parse_vehicle_feed(std::string_view payload);

// Parses a `GET /stops` payload. Duplicate stop_ids keep the first occurrence
// and emit a warning per dropped entry.
std::vector<stop> parse_stop_feed(std::string_view payload);

struct http_options {
  std::chrono::seconds timeout{30};
  // Sent verbatim as the Authorization header when set.
  std::optional<std::string> api_key;
};

// GET `url` and return the body. Transport failures and 5xx responses raise a
// retryable ingest_error; other non-2xx statuses raise a non-retryable one.
std::string http_get(std::string const& url, http_options const&);

// `base_url` is the feed root, e.g. "https://tfe-opendata.com/api/v1".
std::vector<vehicle_observation> fetch_vehicle_snapshot(
    std::string const& base_url, http_options const& = {});

std::vector<stop> fetch_stops(std::string const& base_url,
                              http_options const& = {});

}  // namespace stopscape
