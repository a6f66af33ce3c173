#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stopscape/ingest/observation.h"

namespace stopscape {

struct snapshot_batch {
  std::string batch_id;
  std::int64_t retrieved_at{0};  // UTC epoch seconds
  std::vector<vehicle_observation> observations;
};

struct snapshot_record {
  std::string batch_id;
  std::int64_t retrieved_at{0};
  vehicle_observation observation;

  friend bool operator==(snapshot_record const&,
                         snapshot_record const&) = default;
};

// One NDJSON line, explicit nulls for absent optionals, no trailing newline.
std::string to_snapshot_line(snapshot_record const&);

// `offset` is the byte position of the line within its file and is added to
// any parse_error offset.
snapshot_record parse_snapshot_line(std::string_view line,
                                    std::size_t offset = 0);

std::vector<snapshot_record> read_snapshots(std::filesystem::path const&);

// Drops repeated (vehicle_id, timestamp) pairs, keeping the first.
std::vector<vehicle_observation> deduplicate(
    std::vector<vehicle_observation> observations);

// Append-only store of polled batches backed by an NDJSON file. A batch whose
// id is already present is ignored, so re-appending is idempotent.
class snapshot_store {
public:
  explicit snapshot_store(std::filesystem::path observations_path);

  // Returns the number of records written; 0 if the batch id already exists.
  // Throws store_error if the file cannot be written.
  std::size_t append(snapshot_batch const&);

  bool contains(std::string const& batch_id) const;
  std::size_t batch_count() const { return batch_ids_.size(); }

  std::vector<snapshot_record> read_all() const;

  std::filesystem::path const& path() const { return path_; }

private:
  std::filesystem::path path_;
  std::set<std::string> batch_ids_;
};

// Stop list persisted as `{"retrieved_at": t, "stops": [...]}`, which the
// stop feed parser reads back directly.
void write_stops(std::filesystem::path const&, std::vector<stop> const&,
                 std::int64_t retrieved_at);
std::vector<stop> read_stops(std::filesystem::path const&);

}  // namespace stopscape
