#include "stopscape/kde/kde.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>

#include "stopscape/error.h"

namespace stopscape::kde {

namespace {

constexpr double inv_two_pi = 1.0 / (2.0 * std::numbers::pi);

void validate(grid_spec const& g) {
  if (g.nx == 0 || g.ny == 0) {
    throw domain_error{"grid needs at least one cell per axis"};
  }
  if (!(g.cell_width > 0.0) || !(g.cell_height > 0.0)) {
    throw domain_error{"grid cells need positive size"};
  }
}

// Index range [first, last) of cell centres within `reach` of `c` along one
// axis.
std::pair<std::size_t, std::size_t> cells_within(double c, double reach,
                                                 double origin, double size,
                                                 std::size_t n) {
  auto const lo = std::ceil((c - reach - origin) / size - 0.5);
  auto const hi = std::floor((c + reach - origin) / size - 0.5);
  auto const first = static_cast<std::size_t>(std::max(lo, 0.0));
  if (hi < 0.0 || first >= n) {
    return {0, 0};
  }
  auto const last =
      std::min(static_cast<std::size_t>(hi) + 1, n);
  return {first, std::max(first, last)};
}

}  // namespace

grid_spec padded_grid(std::span<geo::projected_point const> pts, double pad,
                      std::size_t n) {
  if (pts.empty()) {
    throw domain_error{"cannot size a grid around zero points"};
  }
  if (n == 0) {
    throw domain_error{"grid needs at least one cell per axis"};
  }
  if (!(pad >= 0.0)) {
    throw domain_error{"grid padding must be non-negative"};
  }
  auto const [min_x, max_x] = std::minmax_element(
      begin(pts), end(pts), [](auto& a, auto& b) { return a.x < b.x; });
  auto const [min_y, max_y] = std::minmax_element(
      begin(pts), end(pts), [](auto& a, auto& b) { return a.y < b.y; });
  auto width = max_x->x - min_x->x + 2.0 * pad;
  auto height = max_y->y - min_y->y + 2.0 * pad;
  // A single point with no padding still needs a non-empty extent.
  if (!(width > 0.0)) {
    width = 1.0;
  }
  if (!(height > 0.0)) {
    height = 1.0;
  }
  auto const cx = (min_x->x + max_x->x) / 2.0;
  auto const cy = (min_y->y + max_y->y) / 2.0;
  auto const nd = static_cast<double>(n);
  return {cx - width / 2.0, cy - height / 2.0, width / nd, height / nd, n, n};
}

double density_grid::integral() const {
  return std::accumulate(begin(values), end(values), 0.0) * grid.cell_area();
}

density_grid estimate_density(std::span<geo::projected_point const> points,
                              std::span<double const> weights,
                              grid_spec const& g, double h_x, double h_y) {
  validate(g);
  if (points.size() != weights.size()) {
    throw domain_error{"points and weights differ in length"};
  }
  if (points.empty()) {
    throw domain_error{"density estimate needs at least one point"};
  }
  if (!(h_x > 0.0) || !(h_y > 0.0) || !std::isfinite(h_x) ||
      !std::isfinite(h_y)) {
    throw domain_error{"bandwidths must be positive"};
  }
  auto total = 0.0;
  for (auto const w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw domain_error{"weights must be finite and non-negative"};
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw domain_error{"all weights are zero"};
  }

  // Coincident points are merged into one carrying their summed weight, so a
  // weight of 2 and two unit points at the same place give identical grids.
  std::vector<geo::projected_point const*> sites;
  std::vector<double> site_weight;
  {
    std::map<std::pair<double, double>, std::size_t> seen;
    for (auto i = 0U; i < points.size(); ++i) {
      if (weights[i] == 0.0) {
        continue;
      }
      auto const& p = points[i];
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw domain_error{"point coordinates must be finite"};
      }
      auto const [it, fresh] = seen.try_emplace({p.x, p.y}, sites.size());
      if (fresh) {
        sites.push_back(&p);
        site_weight.push_back(weights[i]);
      } else {
        site_weight[it->second] += weights[i];
      }
    }
  }

  density_grid out{g, h_x, h_y, total, std::vector<double>(g.nx * g.ny, 0.0)};
  auto const active = sites.size();
  auto const truncate = active * g.nx * g.ny > full_summation_limit;
  auto const reach_x = truncation_radius * h_x;
  auto const reach_y = truncation_radius * h_y;
  auto const r2_max = truncation_radius * truncation_radius;

  std::vector<double> gx(g.nx), gy(g.ny);
  for (auto i = 0U; i < sites.size(); ++i) {
    auto const& p = *sites[i];
    auto const [x0, x1] = truncate
                              ? cells_within(p.x, reach_x, g.origin_x,
                                             g.cell_width, g.nx)
                              : std::pair<std::size_t, std::size_t>{0, g.nx};
    auto const [y0, y1] = truncate
                              ? cells_within(p.y, reach_y, g.origin_y,
                                             g.cell_height, g.ny)
                              : std::pair<std::size_t, std::size_t>{0, g.ny};
    for (auto ix = x0; ix < x1; ++ix) {
      auto const u = (p.x - g.center_x(ix)) / h_x;
      gx[ix] = u * u;
    }
    for (auto iy = y0; iy < y1; ++iy) {
      auto const v = (p.y - g.center_y(iy)) / h_y;
      gy[iy] = v * v;
    }
    for (auto iy = y0; iy < y1; ++iy) {
      auto* row = out.values.data() + iy * g.nx;
      for (auto ix = x0; ix < x1; ++ix) {
        auto const r2 = gx[ix] + gy[iy];
        if (truncate && r2 > r2_max) {
          continue;
        }
        row[ix] += site_weight[i] * (inv_two_pi * std::exp(-r2 / 2.0));
      }
    }
  }

  auto const norm = 1.0 / (total * h_x * h_y);
  for (auto& v : out.values) {
    v *= norm;
  }
  return out;
}

std::size_t count_local_maxima(density_grid const& d) {
  auto const nx = d.grid.nx;
  auto const ny = d.grid.ny;
  std::size_t count = 0;
  for (auto iy = 0U; iy < ny; ++iy) {
    for (auto ix = 0U; ix < nx; ++ix) {
      auto const v = d.at(ix, iy);
      auto is_max = true;
      for (auto dy = -1; dy <= 1 && is_max; ++dy) {
        for (auto dx = -1; dx <= 1 && is_max; ++dx) {
          if (dx == 0 && dy == 0) {
            continue;
          }
          auto const jx = static_cast<long>(ix) + dx;
          auto const jy = static_cast<long>(iy) + dy;
          if (jx < 0 || jy < 0 || jx >= static_cast<long>(nx) ||
              jy >= static_cast<long>(ny)) {
            continue;
          }
          is_max = v > d.at(static_cast<std::size_t>(jx),
                            static_cast<std::size_t>(jy));
        }
      }
      count += is_max ? 1U : 0U;
    }
  }
  return count;
}

grid_summary summarize(density_grid const& d) {
  grid_summary s;
  auto const it = std::max_element(begin(d.values), end(d.values));
  auto const flat = static_cast<std::size_t>(it - d.values.begin());
  s.max = *it;
  s.argmax = {flat % d.grid.nx, flat / d.grid.nx};

  std::vector<double> sorted = d.values;
  std::sort(begin(sorted), end(sorted), std::greater<>{});
  auto const top = (sorted.size() + 9) / 10;
  auto const total = std::accumulate(begin(sorted), end(sorted), 0.0);
  auto const head = std::accumulate(
      begin(sorted), begin(sorted) + static_cast<std::ptrdiff_t>(top), 0.0);
  s.top_decile_mass_fraction = total > 0.0 ? head / total : 0.0;
  s.local_maxima = count_local_maxima(d);
  return s;
}

std::vector<sweep_entry> bandwidth_sweep(
    std::span<geo::projected_point const> points,
    std::span<double const> weights, grid_spec const& g,
    std::span<double const> h_values) {
  if (h_values.empty()) {
    throw domain_error{"bandwidth sweep needs at least one bandwidth"};
  }
  std::vector<sweep_entry> out;
  out.reserve(h_values.size());
  for (auto const h : h_values) {
    auto grid = estimate_density(points, weights, g, h, h);
    auto summary = summarize(grid);
    out.push_back({h, std::move(grid), summary});
  }
  return out;
}

}  // namespace stopscape::kde
