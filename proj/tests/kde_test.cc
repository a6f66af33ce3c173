#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stopscape/error.h"
#include "stopscape/kde/kde.h"

#include "support/oracles.h"

using namespace stopscape;
using namespace stopscape::kde;
namespace ts = stopscape::test_support;

namespace {

using pts_t = std::vector<geo::projected_point>;

geo::projected_point pt(double x, double y) { return {x, y, std::nullopt}; }

// Plain unweighted estimator evaluated directly at one location.
double direct_estimate(pts_t const& p, double x, double y, double hx,
                       double hy) {
  double sum = 0.0;
  for (auto const& q : p) {
    auto const u = (q.x - x) / hx, v = (q.y - y) / hy;
    sum += std::exp(-0.5 * (u * u + v * v)) / (2.0 * std::numbers::pi);
  }
  return sum / (static_cast<double>(p.size()) * hx * hy);
}

grid_spec square_grid(double lo, double hi, std::size_t n) {
  auto const c = (hi - lo) / static_cast<double>(n);
  return {lo, lo, c, c, n, n};
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

}  // namespace

TEST(kde, single_point_peak_value) {
  pts_t const p{pt(0.0, 0.0)};
  // 3x3 grid with the middle cell centred on the point
  grid_spec const g{-1.5, -1.5, 1.0, 1.0, 3, 3};
  auto const d = estimate_density(p, ones(1), g, 1.0, 1.0);
  EXPECT_NEAR(d.at(1, 1), 1.0 / (2.0 * std::numbers::pi), 1e-12);
  EXPECT_NEAR(d.at(0, 1), std::exp(-0.5) / (2.0 * std::numbers::pi), 1e-12);
}

TEST(kde, preconditions) {
  pts_t const p{pt(0, 0), pt(1, 1)};
  auto const g = square_grid(-5, 5, 8);
  EXPECT_THROW(estimate_density(p, ones(2), g, 0.0, 1.0), domain_error);
  EXPECT_THROW(estimate_density(p, ones(2), g, 1.0, -1.0), domain_error);
  EXPECT_THROW(estimate_density(p, std::vector{0.0, 0.0}, g, 1.0, 1.0),
               domain_error);
  EXPECT_THROW(estimate_density(p, std::vector{1.0, -1.0}, g, 1.0, 1.0),
               domain_error);
  EXPECT_THROW(estimate_density(p, ones(3), g, 1.0, 1.0), domain_error);
  EXPECT_THROW(estimate_density(pts_t{}, ones(0), g, 1.0, 1.0), domain_error);
}

TEST(kde, reflection_symmetry) {
  pts_t const p{pt(-3.0, 0.0), pt(3.0, 0.0)};
  auto const g = square_grid(-10, 10, 40);
  auto const d = estimate_density(p, ones(2), g, 1.5, 1.5);
  for (auto iy = 0U; iy < g.ny; ++iy) {
    for (auto ix = 0U; ix < g.nx; ++ix) {
      EXPECT_NEAR(d.at(ix, iy), d.at(g.nx - 1 - ix, iy), 1e-15);
    }
  }
  // cells centred on the two points: x = -3 -> ix 14, x = 3 -> ix 26 (cells
  // are 0.5 wide, so these sit 0.25 from the points on mirrored sides)
  EXPECT_NEAR(d.at(13, 20), d.at(26, 20), 1e-15);
}

TEST(kde, weight_two_equals_two_coincident_points) {
  std::mt19937_64 rng{1};
  auto base = ts::uniform_square(rng, 30, 100.0);
  auto doubled = base;
  doubled.push_back(base[7]);
  auto w = ones(30);
  w[7] = 2.0;
  auto const g = square_grid(-20, 120, 64);
  auto const a = estimate_density(base, w, g, 8.0, 5.0);
  // the duplicate is appended at the end; reorder so it follows its twin
  pts_t ordered(base.begin(), base.begin() + 8);
  ordered.push_back(base[7]);
  ordered.insert(ordered.end(), base.begin() + 8, base.end());
  auto const b = estimate_density(ordered, ones(31), g, 8.0, 5.0);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.total_weight, b.total_weight);
}

TEST(kde, unit_weights_match_direct_formula) {
  std::mt19937_64 rng{2};
  auto const p = ts::uniform_square(rng, 120, 1'000.0);
  auto const g = square_grid(-200, 1'200, 48);
  auto const d = estimate_density(p, ones(p.size()), g, 90.0, 60.0);
  auto const peak = summarize(d).max;
  for (auto iy = 0U; iy < g.ny; ++iy) {
    for (auto ix = 0U; ix < g.nx; ++ix) {
      auto const ref = direct_estimate(p, g.center_x(ix), g.center_y(iy), 90.0, 60.0);
      ASSERT_NEAR(d.at(ix, iy), ref, 1e-12 * peak);
    }
  }
}

TEST(kde, weight_scaling_leaves_field_unchanged) {
  std::mt19937_64 rng{3};
  auto const p = ts::uniform_square(rng, 80, 500.0);
  std::uniform_real_distribution<double> wd{0.0, 50.0};
  std::vector<double> w;
  for (auto i = 0U; i < p.size(); ++i) w.push_back(wd(rng));
  auto const g = square_grid(-100, 600, 40);
  auto const a = estimate_density(p, w, g, 40.0, 40.0);
  auto scaled = w;
  for (auto& x : scaled) x *= 4.0;
  EXPECT_EQ(estimate_density(p, scaled, g, 40.0, 40.0).values, a.values);
  for (auto& x : scaled) x *= 0.37;
  auto const c = estimate_density(p, scaled, g, 40.0, 40.0);
  for (auto i = 0U; i < a.values.size(); ++i) {
    ASSERT_NEAR(c.values[i], a.values[i], 1e-12 * a.values[i] + 1e-300);
  }
}

TEST(kde, mass_integrates_to_one_inside_bounds) {
  std::mt19937_64 rng{4};
  for (auto trial = 0; trial < 10; ++trial) {
    auto const h = 20.0 + static_cast<double>(rng() % 60);
    // points stay >= 4h from every grid edge
    auto p = ts::uniform_square(rng, 200, 1'000.0);
    std::uniform_real_distribution<double> wd{0.5, 20.0};
    std::vector<double> w;
    for (auto i = 0U; i < p.size(); ++i) w.push_back(wd(rng));
    auto const g = padded_grid(p, 4.0 * h, 128);
    auto const d = estimate_density(p, w, g, h, h);
    auto const mass = d.integral();
    EXPECT_GE(mass, 0.98);
    EXPECT_LE(mass, 1.0);
    for (auto v : d.values) {
      ASSERT_TRUE(std::isfinite(v));
      ASSERT_GE(v, 0.0);
    }
    // intensity sums back to the total weight
    double counts = 0.0;
    for (auto iy = 0U; iy < g.ny; ++iy)
      for (auto ix = 0U; ix < g.nx; ++ix) counts += d.intensity(ix, iy);
    EXPECT_NEAR(counts, mass * d.total_weight, 1e-9 * d.total_weight);
  }
}

TEST(kde, negligible_density_far_from_mass) {
  pts_t const p{pt(0, 0), pt(10, 5)};
  auto const g = square_grid(-200, 200, 80);
  auto const d = estimate_density(p, std::vector{3.0, 1.0}, g, 10.0, 10.0);
  auto const peak = summarize(d).max;
  for (auto iy = 0U; iy < g.ny; ++iy) {
    for (auto ix = 0U; ix < g.nx; ++ix) {
      auto const x = g.center_x(ix), y = g.center_y(iy);
      auto const near = std::min(std::hypot(x, y), std::hypot(x - 10, y - 5));
      if (near >= 60.0) {
        ASSERT_LT(d.at(ix, iy), 1e-6 * peak);
      }
    }
  }
}

TEST(kde, translation_equivariance) {
  std::mt19937_64 rng{5};
  auto const p = ts::uniform_square(rng, 60, 300.0);
  auto const g = square_grid(-50, 350, 32);
  auto const a = estimate_density(p, ones(p.size()), g, 25.0, 35.0);
  auto shifted = p;
  for (auto& q : shifted) {
    q.x += 5'000.25;
    q.y -= 1'234.5;
  }
  auto g2 = g;
  g2.origin_x += 5'000.25;
  g2.origin_y -= 1'234.5;
  auto const b = estimate_density(shifted, ones(p.size()), g2, 25.0, 35.0);
  auto const peak = summarize(a).max;
  for (auto i = 0U; i < a.values.size(); ++i) {
    ASSERT_NEAR(a.values[i], b.values[i], 1e-10 * peak);
  }
}

TEST(kde, truncated_summation_close_to_full) {
  std::mt19937_64 rng{6};
  auto const p = ts::uniform_square(rng, 400, 10'000.0);
  auto const g = padded_grid(p, 900.0, 128);  // 400 * 128^2 > 10^6 pairs
  auto const d = estimate_density(p, ones(p.size()), g, 300.0, 300.0);
  auto const peak = summarize(d).max;
  for (auto iy = 0U; iy < g.ny; iy += 7) {
    for (auto ix = 0U; ix < g.nx; ix += 5) {
      auto const ref = direct_estimate(p, g.center_x(ix), g.center_y(iy), 300.0, 300.0);
      ASSERT_NEAR(d.at(ix, iy), ref, 1e-6 * peak);
    }
  }
}

TEST(kde, padded_grid_covers_points) {
  pts_t const p{pt(0, 0), pt(100, 40)};
  auto const g = padded_grid(p, 30.0, 16);
  EXPECT_EQ(g.nx, 16U);
  EXPECT_DOUBLE_EQ(g.origin_x, -30.0);
  EXPECT_DOUBLE_EQ(g.origin_y, -30.0);
  EXPECT_DOUBLE_EQ(g.cell_width * 16, 160.0);
  EXPECT_DOUBLE_EQ(g.cell_height * 16, 100.0);
  EXPECT_THROW(padded_grid(pts_t{}, 1.0), domain_error);
}

TEST(kde, local_maxima_and_summary_match_oracle) {
  std::mt19937_64 rng{7};
  for (auto trial = 0; trial < 10; ++trial) {
    auto const p = ts::uniform_square(rng, 15, 1'000.0);
    auto const g = square_grid(-200, 1'200, 70);
    auto const d = estimate_density(p, ones(p.size()), g, 40.0, 40.0);
    auto const s = summarize(d);
    EXPECT_EQ(s.local_maxima, ts::strict_local_maxima(d.values, g.nx, g.ny));
    EXPECT_EQ(s.max, d.at(s.argmax.ix, s.argmax.iy));
    EXPECT_GT(s.top_decile_mass_fraction, 0.1);
    EXPECT_LE(s.top_decile_mass_fraction, 1.0);
  }
}

TEST(kde, sweep_single_bandwidth_equals_direct) {
  std::mt19937_64 rng{8};
  auto const p = ts::uniform_square(rng, 50, 500.0);
  auto const w = ones(p.size());
  auto const g = padded_grid(p, 300.0, 64);
  std::vector const h{100.0};
  auto const sweep = bandwidth_sweep(p, w, g, h);
  ASSERT_EQ(sweep.size(), 1U);
  EXPECT_EQ(sweep[0].h, 100.0);
  EXPECT_EQ(sweep[0].grid.values, estimate_density(p, w, g, 100.0, 100.0).values);
  EXPECT_THROW(bandwidth_sweep(p, w, g, std::vector<double>{}), domain_error);
  EXPECT_THROW(bandwidth_sweep(p, w, g, std::vector{100.0, 0.0}), domain_error);
}

TEST(kde, two_clumps_merge_with_large_bandwidth) {
  std::mt19937_64 rng{9};
  std::normal_distribution<double> tight{0.0, 0.02};
  pts_t p;
  for (auto i = 0; i < 20; ++i) {
    p.push_back(pt(tight(rng), tight(rng)));
    p.push_back(pt(10.0 + tight(rng), tight(rng)));
  }
  auto const g = square_grid(-15, 25, 200);
  auto const sweep = bandwidth_sweep(p, ones(p.size()), g, std::vector{0.1, 5.0});
  EXPECT_EQ(sweep[0].summary.local_maxima, 2U);
  EXPECT_EQ(sweep[1].summary.local_maxima, 1U);
}

TEST(kde, peak_non_increasing_over_sweep) {
  std::mt19937_64 rng{10};
  std::vector const hs{100.0, 300.0, 500.0, 800.0, 1'000.0};
  for (auto trial = 0; trial < 5; ++trial) {
    pts_t p;
    std::normal_distribution<double> n{0.0, 150.0};
    std::uniform_real_distribution<double> c{0.0, 5'000.0};
    for (auto k = 0; k < 4; ++k) {
      auto const cx = c(rng), cy = c(rng);
      for (auto i = 0; i < 30; ++i) p.push_back(pt(cx + n(rng), cy + n(rng)));
    }
    std::uniform_real_distribution<double> wd{1.0, 100.0};
    std::vector<double> w;
    for (auto i = 0U; i < p.size(); ++i) w.push_back(wd(rng));
    auto const g = padded_grid(p, 3'000.0, 256);
    auto const sweep = bandwidth_sweep(p, w, g, hs);
    for (auto i = 1U; i < sweep.size(); ++i) {
      EXPECT_LE(sweep[i].summary.max, sweep[i - 1].summary.max);
    }
  }
}
