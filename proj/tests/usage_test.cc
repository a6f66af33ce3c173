#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include "stopscape/cleanse/cleanse.h"
#include "stopscape/error.h"
#include "stopscape/geo/projection.h"
#include "stopscape/usage/usage.h"
#include "stopscape/warnings.h"

#include "support/oracles.h"
#include "support/synthetic_city.h"

using namespace stopscape;
using namespace stopscape::usage;
namespace ts = stopscape::test_support;

namespace {

lat_lon const edinburgh{55.95, -3.19};

vehicle_observation at(double lat, double lon, std::string service = "26") {
  vehicle_observation o;
  o.vehicle_id = "v";
  o.latitude = lat;
  o.longitude = lon;
  o.service_name = std::move(service);
  o.timestamp = 1;
  return o;
}

std::vector<stop> random_stops(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d{-0.03, 0.03};
  std::vector<stop> out;
  for (auto i = 0U; i < n; ++i) {
    out.push_back({"S" + std::to_string(i), "", edinburgh.lat + d(rng),
                   edinburgh.lon + d(rng)});
  }
  return out;
}

std::size_t total(std::vector<stop_usage> const& u) {
  return std::accumulate(u.begin(), u.end(), std::size_t{0},
                         [](auto s, auto const& r) { return s + r.vehicle_count; });
}

}  // namespace

TEST(usage, observation_at_stop) {
  std::mt19937_64 rng{1};
  auto const stops = random_stops(rng, 10);
  std::vector const obs{at(stops[4].latitude, stops[4].longitude)};
  auto const u = assign_vehicles_to_stops(obs, stops);
  ASSERT_EQ(u.size(), stops.size());
  for (auto i = 0U; i < u.size(); ++i) {
    EXPECT_EQ(u[i].stop_id, stops[i].stop_id);
    EXPECT_EQ(u[i].vehicle_count, i == 4 ? 1U : 0U);
  }
}

TEST(usage, no_observations_all_zero) {
  std::mt19937_64 rng{2};
  auto const stops = random_stops(rng, 5);
  auto const u = assign_vehicles_to_stops({}, stops);
  ASSERT_EQ(u.size(), 5U);
  EXPECT_EQ(total(u), 0U);
  EXPECT_THROW(assign_vehicles_to_stops({}, std::span<stop const>{}),
               domain_error);
}

TEST(usage, matches_linear_scan_assignment) {
  std::mt19937_64 rng{3};
  auto const stops = random_stops(rng, 50);
  geo::local_projection const p{edinburgh};
  std::vector<geo::projected_point> projected;
  std::vector<std::string> ids;
  for (auto const& s : stops) {
    projected.push_back(p.project({s.latitude, s.longitude}));
    ids.push_back(s.stop_id);
  }
  std::uniform_real_distribution<double> d{-0.035, 0.035};
  std::vector<vehicle_observation> obs;
  std::map<std::string, std::size_t> expected;
  for (auto i = 0; i < 1'000; ++i) {
    obs.push_back(at(edinburgh.lat + d(rng), edinburgh.lon + d(rng)));
    auto const q = p.project(obs.back().position());
    ++expected[ts::linear_nearest(q.x, q.y, projected, ids)];
  }
  auto const u = assign_vehicles_to_stops(obs, stops, p);
  EXPECT_EQ(total(u), 1'000U);
  for (auto const& r : u) {
    EXPECT_EQ(r.vehicle_count, expected[r.stop_id]) << r.stop_id;
  }

  // permuting observations does not change counts
  std::shuffle(obs.begin(), obs.end(), rng);
  EXPECT_EQ(assign_vehicles_to_stops(obs, stops, p), u);
}

TEST(usage, optional_assignment_cutoff) {
  std::vector<stop> const stops{{"A", "", 55.95, -3.19}};
  std::vector const obs{at(55.95, -3.19), at(55.96, -3.19)};  // second ~1.1 km
  EXPECT_EQ(total(assign_vehicles_to_stops(obs, stops)), 2U);
  EXPECT_EQ(total(assign_vehicles_to_stops(obs, stops, {500.0})), 1U);
}

TEST(usage, synthetic_city_counts_recovered) {
  auto const city = ts::make_synthetic_city(5, 12);
  std::vector<cleanse::depot_zone> const zones{
      {"depot", city.depot.lat, city.depot.lon, 250.0}};
  std::vector<vehicle_observation> obs;
  for (auto const& r : cleanse::cleanse(city.records, zones).kept) {
    obs.push_back(r.observation);
  }
  auto const u = assign_vehicles_to_stops(obs, city.stops);
  for (auto i = 0U; i < u.size(); ++i) {
    EXPECT_EQ(u[i].vehicle_count, city.counts[i]) << u[i].stop_id;
  }
}

TEST(usage, service_table_top_k) {
  std::vector<vehicle_observation> obs;
  for (auto [name, n] : {std::pair{"26", 3}, {"30", 2}, {"44", 1}}) {
    for (auto i = 0; i < n; ++i) obs.push_back(at(0, 0, name));
  }
  EXPECT_EQ(service_frequency_table(obs, 2),
            (std::vector<service_count>{{"26", 3}, {"30", 2}}));
  EXPECT_EQ(service_frequency_table(obs, 0).size(), 3U);
}

TEST(usage, service_ties_in_string_order) {
  std::vector const obs{at(0, 0, "3"), at(0, 0, "16"), at(0, 0, "T50"),
                        at(0, 0, "16"), at(0, 0, "3"), at(0, 0, "T50")};
  EXPECT_EQ(service_frequency_table(obs, 0),
            (std::vector<service_count>{{"16", 2}, {"3", 2}, {"T50", 2}}));
}

TEST(usage, service_table_conserves_and_is_permutation_stable) {
  std::mt19937_64 rng{4};
  std::vector<vehicle_observation> obs;
  for (auto i = 0; i < 2'000; ++i) {
    obs.push_back(at(0, 0, std::to_string(rng() % 40)));
  }
  auto const table = service_frequency_table(obs, 0);
  auto const sum = std::accumulate(table.begin(), table.end(), std::size_t{0},
                                   [](auto s, auto const& r) { return s + r.count; });
  EXPECT_EQ(sum, obs.size());
  EXPECT_TRUE(std::is_sorted(table.begin(), table.end(), [](auto const& a, auto const& b) {
    return a.count != b.count ? a.count > b.count : a.service_name < b.service_name;
  }));
  std::shuffle(obs.begin(), obs.end(), rng);
  EXPECT_EQ(service_frequency_table(obs, 0), table);
}

TEST(usage, csv_round_trip_and_alignment) {
  auto const dir = ts::scratch_dir("usage-csv");
  std::vector<stop_usage> const rows{{"A", 3}, {"B,\"x\"", 0}, {"C", 12}};
  write_usage_csv(dir / "u.csv", rows);
  EXPECT_EQ(read_usage_csv(dir / "u.csv"), rows);

  std::vector<stop> const stops{{"C", "", 0, 0}, {"A", "", 0, 0},
                                {"B,\"x\"", "", 0, 0}};
  EXPECT_EQ(counts_for(stops, rows), (std::vector<double>{12, 3, 0}));
  std::vector<stop> const extra{{"A", "", 0, 0}, {"Z", "", 0, 0}};
  EXPECT_THROW(counts_for(extra, rows), consistency_error);

  {
    std::ofstream out{dir / "bad.csv"};
    out << "stop_id,vehicle_count\nA,3\nB,lots\n";
  }
  try {
    read_usage_csv(dir / "bad.csv");
    FAIL();
  } catch (parse_error const& e) {
    EXPECT_EQ(e.byte_offset(), 28U);  // start of the "lots" field
  }
}
