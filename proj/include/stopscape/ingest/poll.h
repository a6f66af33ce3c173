#pragma once

#include <chrono>
#include <functional>
#include <vector>

#include "stopscape/ingest/feed.h"
#include "stopscape/ingest/snapshot_store.h"

namespace stopscape {

struct poll_clock {
  using time_point = std::chrono::system_clock::time_point;

  virtual ~poll_clock() = default;
  virtual time_point now() = 0;
  virtual void sleep_until(time_point) = 0;
};

struct system_poll_clock final : poll_clock {
  time_point now() override;
  void sleep_until(time_point) override;
};

struct poll_schedule {
  std::chrono::seconds interval{300};
  std::chrono::seconds duration{std::chrono::hours{24 * 8}};

  // floor(duration / interval) + 1
  std::size_t attempts() const;
};

struct poll_summary {
  std::size_t attempts{0};
  std::size_t batches{0};
  std::size_t records{0};
  std::size_t failures{0};
};

using vehicle_fetcher = std::function<std::vector<vehicle_observation>()>;

// Fixed-rate polling: attempt i is scheduled at start + i * interval no matter
// how long earlier fetches took. Fetch failures (ingest_error, parse_error)
// are counted and logged; store failures propagate.
poll_summary poll(vehicle_fetcher const&, poll_schedule const&,
                  snapshot_store&, poll_clock&);

poll_summary poll(std::string const& base_url, http_options const&,
                  poll_schedule const&, snapshot_store&);

}  // namespace stopscape
