#pragma once

#include <span>
#include <vector>

#include "stopscape/geo/projection.h"

namespace stopscape::kde {

// Full pairwise evaluation up to this many (point, cell) pairs; beyond it,
// contributions farther than `truncation_radius` bandwidths are dropped.
inline constexpr std::size_t full_summation_limit = 1'000'000;
inline constexpr double truncation_radius = 6.0;

struct grid_spec {
  double origin_x{0.0};  // lower-left corner of cell (0, 0), metres
  double origin_y{0.0};
  double cell_width{1.0};
  double cell_height{1.0};
  std::size_t nx{1};
  std::size_t ny{1};

  double center_x(std::size_t ix) const {
    return origin_x + (static_cast<double>(ix) + 0.5) * cell_width;
  }
  double center_y(std::size_t iy) const {
    return origin_y + (static_cast<double>(iy) + 0.5) * cell_height;
  }
  double cell_area() const { return cell_width * cell_height; }
};

// n x n cells over the bounding box of `points` padded by `pad` metres on
// every side. Throws domain_error for an empty point set or n == 0.
grid_spec padded_grid(std::span<geo::projected_point const>, double pad,
                      std::size_t n = 256);

struct density_grid {
  grid_spec grid;
  double h_x{0.0};
  double h_y{0.0};
  double total_weight{0.0};
  std::vector<double> values;  // row-major, values[iy * nx + ix], per m^2

  double at(std::size_t ix, std::size_t iy) const {
    return values[iy * grid.nx + ix];
  }
  // Count-scaled value: density * total weight * cell area.
  double intensity(std::size_t ix, std::size_t iy) const {
    return at(ix, iy) * total_weight * grid.cell_area();
  }
  // Riemann sum of the density over the grid.
  double integral() const;
};

// Weighted product-Gaussian KDE evaluated at every cell centre:
//   f(x, y) = 1 / (W h_x h_y) * sum_i w_i K((x_i - x) / h_x, (y_i - y) / h_y)
// with K(u, v) = exp(-(u^2 + v^2) / 2) / (2 pi) and W = sum_i w_i. With unit
// weights this is the plain estimator with W = n. Coincident points are merged
// (weights summed) and each cell accumulates in first-occurrence order.
// Throws domain_error for mismatched sizes, non-positive bandwidths, negative
// weights, or no positive weight.
density_grid estimate_density(std::span<geo::projected_point const> points,
                              std::span<double const> weights,
                              grid_spec const&, double h_x, double h_y);

struct cell_index {
  std::size_t ix{0};
  std::size_t iy{0};

  friend bool operator==(cell_index const&, cell_index const&) = default;
};

struct grid_summary {
  double max{0.0};
  cell_index argmax;
  double top_decile_mass_fraction{0.0};  // share of mass in the top 10% cells
  std::size_t local_maxima{0};
};

// Cells strictly greater than all of their (up to 8) neighbours.
std::size_t count_local_maxima(density_grid const&);

grid_summary summarize(density_grid const&);

struct sweep_entry {
  double h{0.0};
  density_grid grid;
  grid_summary summary;
};

// One isotropic estimate (h_x = h_y = h) per bandwidth, on a shared grid.
std::vector<sweep_entry> bandwidth_sweep(
    std::span<geo::projected_point const> points,
    std::span<double const> weights, grid_spec const&,
    std::span<double const> h_values);

}  // namespace stopscape::kde
