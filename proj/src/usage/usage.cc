#include "stopscape/usage/usage.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>

#include "csv.h"
#include "stopscape/error.h"
#include "stopscape/geo/stop_index.h"
#include "stopscape/warnings.h"

namespace stopscape::usage {

std::vector<stop_usage> assign_vehicles_to_stops(
    std::span<vehicle_observation const> observations,
    std::span<stop const> stops, geo::local_projection const& proj,
    assign_options const& opt) {
  if (stops.empty()) {
    throw domain_error{"cannot assign vehicles to an empty stop set"};
  }
  geo::stop_index const index{stops, proj};
  std::vector<stop_usage> out;
  out.reserve(stops.size());
  for (auto const& s : stops) {
    out.push_back({s.stop_id, 0});
  }
  std::size_t unassigned = 0;
  for (auto const& o : observations) {
    auto const m = index.nearest(proj.project(o.position()));
    if (opt.max_assign_distance.has_value() &&
        m.distance > *opt.max_assign_distance) {
      ++unassigned;
      continue;
    }
    ++out[m.position].vehicle_count;
  }
  if (unassigned != 0) {
    warn(std::to_string(unassigned) +
         " observations lie beyond the maximum assignment distance");
  }
  return out;
}

std::vector<stop_usage> assign_vehicles_to_stops(
    std::span<vehicle_observation const> observations,
    std::span<stop const> stops, assign_options const& opt) {
  if (stops.empty()) {
    throw domain_error{"cannot assign vehicles to an empty stop set"};
  }
  std::vector<lat_lon> coords;
  coords.reserve(stops.size());
  for (auto const& s : stops) {
    coords.push_back(s.position());
  }
  return assign_vehicles_to_stops(
      observations, stops, geo::local_projection::centered_on(coords), opt);
}

std::vector<service_count> service_frequency_table(
    std::span<vehicle_observation const> observations, std::size_t top_k) {
  std::map<std::string, std::size_t> counts;
  std::size_t unnamed = 0;
  for (auto const& o : observations) {
    if (o.service_name.has_value()) {
      ++counts[*o.service_name];
    } else {
      ++unnamed;
    }
  }
  if (unnamed != 0) {
    warn(std::to_string(unnamed) +
         " observations without service_name left out of the service table");
  }
  std::vector<service_count> out;
  out.reserve(counts.size());
  for (auto const& [name, n] : counts) {
    out.push_back({name, n});
  }
  std::stable_sort(begin(out), end(out), [](auto const& a, auto const& b) {
    return a.count > b.count;
  });
  if (top_k != 0 && out.size() > top_k) {
    out.resize(top_k);
  }
  return out;
}

void write_usage_csv(std::filesystem::path const& p,
                     std::span<stop_usage const> rows) {
  std::ofstream out{p, std::ios::binary | std::ios::trunc};
  out << "stop_id,vehicle_count\n";
  for (auto const& r : rows) {
    out << detail::csv_field(r.stop_id) << ',' << r.vehicle_count << '\n';
  }
  if (!out) {
    throw error{"cannot write " + p.string()};
  }
}

std::vector<stop_usage> read_usage_csv(std::filesystem::path const& p) {
  std::ifstream in{p, std::ios::binary};
  if (!in) {
    throw domain_error{"cannot open usage file " + p.string()};
  }
  std::vector<stop_usage> rows;
  std::string line;
  std::size_t offset = 0;
  auto first = true;
  while (std::getline(in, line)) {
    auto const line_offset = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (first) {
      first = false;
      if (line.rfind("stop_id", 0) == 0) {
        continue;
      }
    }
    if (line.empty()) {
      continue;
    }
    std::size_t pos = 0;
    auto id = detail::read_csv_field(line, pos);
    if (!id || id->empty() || pos >= line.size() || line[pos] != ',') {
      throw parse_error{"usage row without stop_id,vehicle_count",
                        line_offset};
    }
    auto const field = pos + 1;
    try {
      std::size_t used = 0;
      auto const count = std::stoull(line.substr(field), &used);
      if (used != line.size() - field || line[field] == '-' ||
          line[field] == '+' || line[field] == ' ') {
        throw std::invalid_argument{"trailing characters"};
      }
      rows.push_back({std::move(*id), static_cast<std::size_t>(count)});
    } catch (std::logic_error const&) {
      throw parse_error{"invalid vehicle_count in usage row",
                        line_offset + field};
    }
  }
  return rows;
}

void write_services_csv(std::filesystem::path const& p,
                        std::span<service_count const> rows) {
  std::ofstream out{p, std::ios::binary | std::ios::trunc};
  out << "service_name,count\n";
  for (auto const& r : rows) {
    out << detail::csv_field(r.service_name) << ',' << r.count << '\n';
  }
  if (!out) {
    throw error{"cannot write " + p.string()};
  }
}

std::vector<double> counts_for(std::span<stop const> stops,
                               std::span<stop_usage const> usage) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (auto const& u : usage) {
    if (!by_id.emplace(u.stop_id, u.vehicle_count).second) {
      throw consistency_error{"usage lists stop " + u.stop_id + " twice"};
    }
  }
  std::vector<double> out;
  out.reserve(stops.size());
  for (auto const& s : stops) {
    auto const it = by_id.find(s.stop_id);
    if (it == by_id.end()) {
      throw consistency_error{"no usage row for stop " + s.stop_id};
    }
    out.push_back(static_cast<double>(it->second));
    by_id.erase(it);
  }
  if (!by_id.empty()) {
    throw consistency_error{"usage names unknown stop " +
                            by_id.begin()->first};
  }
  return out;
}

}  // namespace stopscape::usage
