#include "stopscape/ingest/poll.h"

#include <thread>

#include "stopscape/error.h"
#include "stopscape/warnings.h"

namespace stopscape {

poll_clock::time_point system_poll_clock::now() {
  return std::chrono::system_clock::now();
}

void system_poll_clock::sleep_until(time_point t) {
  std::this_thread::sleep_until(t);
}

std::size_t poll_schedule::attempts() const {
  if (interval < std::chrono::seconds{1}) {
    throw domain_error{"poll interval must be at least 1 s"};
  }
  if (duration < interval) {
    throw domain_error{"poll duration must be at least one interval"};
  }
  return static_cast<std::size_t>(duration / interval) + 1;
}

poll_summary poll(vehicle_fetcher const& fetch, poll_schedule const& schedule,
                  snapshot_store& store, poll_clock& clock) {
  auto const n = schedule.attempts();
  auto const start = clock.now();
  auto const start_epoch =
      std::chrono::duration_cast<std::chrono::seconds>(start.time_since_epoch())
          .count();

  poll_summary summary;
  for (auto i = 0U; i < n; ++i) {
    clock.sleep_until(start + i * schedule.interval);
    ++summary.attempts;
    auto const retrieved =
        std::chrono::duration_cast<std::chrono::seconds>(
            clock.now().time_since_epoch())
            .count();

    std::vector<vehicle_observation> observations;
    try {
      observations = fetch();
    } catch (ingest_error const& e) {
      ++summary.failures;
      warn("poll attempt " + std::to_string(i) + " failed: " + e.what());
      continue;
    } catch (parse_error const& e) {
      ++summary.failures;
      warn("poll attempt " + std::to_string(i) + " failed: " + e.what());
      continue;
    }

    snapshot_batch batch{
        std::to_string(start_epoch) + "-" + std::to_string(i), retrieved,
        std::move(observations)};
    summary.records += store.append(batch);
    ++summary.batches;
  }
  return summary;
}

poll_summary poll(std::string const& base_url, http_options const& opt,
                  poll_schedule const& schedule, snapshot_store& store) {
  system_poll_clock clock;
  return poll([&] { return fetch_vehicle_snapshot(base_url, opt); }, schedule,
              store, clock);
}

}  // namespace stopscape
