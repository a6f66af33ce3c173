#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stopscape/geo/projection.h"
#include "stopscape/geo/study_area.h"
#include "stopscape/ingest/observation.h"

namespace stopscape::nna {

// Clark-Evans constant for the standard error of the mean NN distance.
inline constexpr double clark_evans_se_constant = 0.26136;

struct histogram_bin {
  double lower{0.0};
  double upper{0.0};
  std::size_t count{0};
};

enum class pattern { clustered, random, dispersed };
std::string_view to_string(pattern);

struct nna_result {
  double r_bar_a{0.0};   // observed mean NN distance, m
  double r_bar_e{0.0};   // expected mean NN distance under CSR, m
  double nni{0.0};       // R = r_bar_a / r_bar_e
  double sigma_re{0.0};  // standard error of r_bar_e, m
  double z{0.0};
  double log10_p_two_tailed{0.0};
  std::size_t n{0};
  double area{0.0};  // m^2
  double rho{0.0};   // points per m^2
  geo::area_method method{geo::area_method::convex_hull};
  double alpha{0.01};
  bool significant{false};  // p < alpha
  pattern classification{pattern::random};
  std::vector<histogram_bin> histogram;

  std::string formatted_p() const;
};

struct z_test_result {
  double z{0.0};
  double sigma_re{0.0};
  double log10_p_two_tailed{0.0};
};

// Throws domain_error on an empty list or negative distances.
double mean_nn_distance(std::span<double const> distances);

// 1 / (2 sqrt(N / area)). Throws domain_error for N = 0 or area <= 0.
double expected_nn_distance(std::size_t n, double area);

// Point density implied by an expected NN distance: 1 / (2 r_e)^2.
double density_from_expected_distance(double r_bar_e);

// r_bar_a / r_bar_e. Throws domain_error for r_bar_e <= 0.
double nni(double r_bar_a, double r_bar_e);

// z = (r_bar_a - r_bar_e) / (0.26136 / sqrt(N rho)), two-tailed p in log10.
// Throws domain_error for N < 2 or rho <= 0.
z_test_result z_test(double r_bar_a, double r_bar_e, std::size_t n,
                     double rho);

// Equal-width bins spanning [0, max distance]; the maximum lands in the last
// bin. Throws domain_error for bins == 0.
std::vector<histogram_bin> distance_histogram(std::span<double const>,
                                              std::size_t bins);

pattern classify(double nni, double log10_p, double alpha);

struct nna_options {
  geo::area_method method{geo::area_method::convex_hull};
  std::size_t histogram_bins{50};
  double alpha{0.01};
};

// Full analysis on already-projected points (metres).
nna_result analyze(std::span<geo::projected_point const>, nna_options const&);

// Projects stops around their centroid, then runs `analyze`. Needs >= 3 stops.
nna_result run_nna(std::span<stop const>, nna_options const& = {});

}  // namespace stopscape::nna
