#include "stopscape/ingest/snapshot_store.h"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "nlohmann/json.hpp"

#include "json_fields.h"
#include "stopscape/error.h"
#include "stopscape/ingest/feed.h"

namespace stopscape {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename T>
ordered_json nullable(std::optional<T> const& v) {
  return v.has_value() ? ordered_json(*v) : ordered_json(nullptr);
}

std::string slurp(std::filesystem::path const& p) {
  std::ifstream in{p, std::ios::binary};
  if (!in) {
    throw store_error{"cannot open " + p.string()};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string to_snapshot_line(snapshot_record const& r) {
  auto const& o = r.observation;
  ordered_json j;
  j["batch_id"] = r.batch_id;
  j["retrieved_at"] = r.retrieved_at;
  j["vehicle_id"] = o.vehicle_id;
  j["timestamp"] = o.timestamp;
  j["latitude"] = o.latitude;
  j["longitude"] = o.longitude;
  j["heading"] = nullable(o.heading);
  j["service_name"] = nullable(o.service_name);
  j["destination"] = nullable(o.destination);
  j["next_stop"] = nullable(o.next_stop);
  return j.dump();
}

snapshot_record parse_snapshot_line(std::string_view line, std::size_t offset) {
  json j;
  try {
    j = json::parse(line);
  } catch (json::parse_error const& e) {
    throw parse_error{std::string{"malformed snapshot record: "} + e.what(),
                      offset + (e.byte > 0 ? e.byte - 1 : 0)};
  }
  auto const require = [&](bool ok, char const* what) {
    if (!ok) {
      throw parse_error{std::string{"snapshot record lacks "} + what, offset};
    }
  };
  require(j.is_object(), "an object");
  auto const id = detail::optional_identifier(j, "vehicle_id");
  auto const batch = detail::optional_identifier(j, "batch_id");
  auto const* retrieved = detail::field(j, "retrieved_at");
  auto const* ts = detail::field(j, "timestamp");
  auto const lat = detail::optional_number(j, "latitude");
  auto const lon = detail::optional_number(j, "longitude");
  require(batch.has_value(), "batch_id");
  require(retrieved != nullptr && retrieved->is_number_integer(),
          "retrieved_at");
  require(id.has_value(), "vehicle_id");
  require(ts != nullptr && ts->is_number_integer(), "timestamp");
  require(lat.has_value() && lon.has_value(), "latitude/longitude");

  snapshot_record r;
  r.batch_id = *batch;
  r.retrieved_at = retrieved->get<std::int64_t>();
  auto& o = r.observation;
  o.vehicle_id = *id;
  o.timestamp = ts->get<std::int64_t>();
  o.latitude = *lat;
  o.longitude = *lon;
  o.heading = detail::optional_number(j, "heading");
  o.service_name = detail::optional_identifier(j, "service_name");
  o.destination = detail::optional_identifier(j, "destination");
  o.next_stop = detail::optional_identifier(j, "next_stop");
  return r;
}

std::vector<snapshot_record> read_snapshots(std::filesystem::path const& p) {
  auto const content = slurp(p);
  std::vector<snapshot_record> out;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string::npos) {
      end = content.size();
    }
    auto line = std::string_view{content}.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (!line.empty()) {
      out.emplace_back(parse_snapshot_line(line, pos));
    }
    pos = end + 1;
  }
  return out;
}

std::vector<vehicle_observation> deduplicate(
    std::vector<vehicle_observation> observations) {
  std::set<std::pair<std::string, std::int64_t>> seen;
  std::vector<vehicle_observation> out;
  out.reserve(observations.size());
  for (auto& o : observations) {
    if (seen.emplace(o.vehicle_id, o.timestamp).second) {
      out.emplace_back(std::move(o));
    }
  }
  return out;
}

snapshot_store::snapshot_store(std::filesystem::path observations_path)
    : path_{std::move(observations_path)} {
  if (std::filesystem::exists(path_)) {
    for (auto const& r : read_snapshots(path_)) {
      batch_ids_.insert(r.batch_id);
    }
  }
}

bool snapshot_store::contains(std::string const& batch_id) const {
  return batch_ids_.contains(batch_id);
}

std::size_t snapshot_store::append(snapshot_batch const& batch) {
  if (contains(batch.batch_id)) {
    return 0;
  }
  auto const unique = deduplicate(batch.observations);
  std::string buf;
  for (auto const& o : unique) {
    buf += to_snapshot_line({batch.batch_id, batch.retrieved_at, o});
    buf += '\n';
  }
  std::ofstream out{path_, std::ios::binary | std::ios::app};
  if (!out) {
    throw store_error{"cannot open " + path_.string() + " for appending"};
  }
  out << buf;
  out.flush();
  if (!out) {
    throw store_error{"write to " + path_.string() + " failed"};
  }
  // Empty batches leave no lines behind and are not remembered across opens.
  batch_ids_.insert(batch.batch_id);
  return unique.size();
}

std::vector<snapshot_record> snapshot_store::read_all() const {
  if (!std::filesystem::exists(path_)) {
    return {};
  }
  return read_snapshots(path_);
}

void write_stops(std::filesystem::path const& p, std::vector<stop> const& stops,
                 std::int64_t retrieved_at) {
  ordered_json doc;
  doc["retrieved_at"] = retrieved_at;
  auto& arr = doc["stops"] = ordered_json::array();
  for (auto const& s : stops) {
    arr.push_back(ordered_json{{"stop_id", s.stop_id},
                               {"name", s.name},
                               {"latitude", s.latitude},
                               {"longitude", s.longitude}});
  }
  std::ofstream out{p, std::ios::binary | std::ios::trunc};
  out << doc.dump(1) << '\n';
  if (!out) {
    throw store_error{"cannot write " + p.string()};
  }
}

std::vector<stop> read_stops(std::filesystem::path const& p) {
  return parse_stop_feed(slurp(p));
}

}  // namespace stopscape
