#include "stopscape/nna/nna.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stopscape/error.h"
#include "stopscape/geo/kd_tree.h"
#include "stopscape/nna/normal_tail.h"

namespace stopscape::nna {

std::string_view to_string(pattern p) {
  switch (p) {
    case pattern::clustered: return "clustered";
    case pattern::dispersed: return "dispersed";
    case pattern::random: break;
  }
  return "random";
}

std::string nna_result::formatted_p() const {
  return format_log10(log10_p_two_tailed);
}

double mean_nn_distance(std::span<double const> d) {
  if (d.empty()) {
    throw domain_error{"mean of an empty distance list"};
  }
  if (std::any_of(begin(d), end(d), [](double v) { return !(v >= 0.0); })) {
    throw domain_error{"distances must be non-negative"};
  }
  return std::accumulate(begin(d), end(d), 0.0) / static_cast<double>(d.size());
}

double expected_nn_distance(std::size_t n, double area) {
  if (n == 0) {
    throw domain_error{"expected NN distance needs N >= 1"};
  }
  if (!(area > 0.0)) {
    throw domain_error{"study area must be positive"};
  }
  auto const rho = static_cast<double>(n) / area;
  return 1.0 / (2.0 * std::sqrt(rho));
}

double density_from_expected_distance(double r_bar_e) {
  if (!(r_bar_e > 0.0)) {
    throw domain_error{"expected NN distance must be positive"};
  }
  return 1.0 / ((2.0 * r_bar_e) * (2.0 * r_bar_e));
}

double nni(double r_bar_a, double r_bar_e) {
  if (!(r_bar_e > 0.0)) {
    throw domain_error{"expected NN distance must be positive"};
  }
  return r_bar_a / r_bar_e;
}

z_test_result z_test(double r_bar_a, double r_bar_e, std::size_t n,
                     double rho) {
  if (n < 2) {
    throw domain_error{"z-test needs N >= 2"};
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw domain_error{"z-test needs a positive, finite density"};
  }
  z_test_result out;
  out.sigma_re =
      clark_evans_se_constant / std::sqrt(static_cast<double>(n) * rho);
  out.z = (r_bar_a - r_bar_e) / out.sigma_re;
  out.log10_p_two_tailed = log10_two_tailed_p(out.z);
  return out;
}

std::vector<histogram_bin> distance_histogram(std::span<double const> d,
                                              std::size_t bins) {
  if (bins == 0) {
    throw domain_error{"histogram needs at least one bin"};
  }
  auto const max = d.empty() ? 0.0 : *std::max_element(begin(d), end(d));
  auto const width = max / static_cast<double>(bins);
  std::vector<histogram_bin> out(bins);
  for (auto i = 0U; i < bins; ++i) {
    out[i].lower = width * i;
    out[i].upper = i + 1 == bins ? max : width * (i + 1);
  }
  for (auto const v : d) {
    auto b = width > 0.0 ? static_cast<std::size_t>(v / width) : 0U;
    ++out[std::min(b, bins - 1)].count;
  }
  return out;
}

pattern classify(double r, double log10_p, double alpha) {
  if (!(log10_p < std::log10(alpha)) || r == 1.0) {
    return pattern::random;
  }
  return r < 1.0 ? pattern::clustered : pattern::dispersed;
}

nna_result analyze(std::span<geo::projected_point const> pts,
                   nna_options const& opt) {
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) {
    throw domain_error{"alpha must lie in (0, 1)"};
  }
  auto const distances = geo::nearest_neighbor_distances(pts);
  auto const region = geo::compute_study_area(pts, opt.method);

  nna_result r;
  r.n = region.point_count;
  r.area = region.area;
  r.rho = region.density;
  r.method = opt.method;
  r.alpha = opt.alpha;
  r.r_bar_a = mean_nn_distance(distances);
  r.r_bar_e = 1.0 / (2.0 * std::sqrt(r.rho));
  r.nni = nni(r.r_bar_a, r.r_bar_e);
  auto const zt = z_test(r.r_bar_a, r.r_bar_e, r.n, r.rho);
  r.sigma_re = zt.sigma_re;
  r.z = zt.z;
  r.log10_p_two_tailed = zt.log10_p_two_tailed;
  r.significant = r.log10_p_two_tailed < std::log10(opt.alpha);
  r.classification = classify(r.nni, r.log10_p_two_tailed, opt.alpha);
  r.histogram = distance_histogram(distances, opt.histogram_bins);
  return r;
}

nna_result run_nna(std::span<stop const> stops, nna_options const& opt) {
  if (stops.size() < 3) {
    throw domain_error{"nearest-neighbour analysis needs at least 3 stops"};
  }
  std::vector<lat_lon> coords;
  coords.reserve(stops.size());
  for (auto const& s : stops) {
    coords.push_back(s.position());
  }
  auto const proj = geo::local_projection::centered_on(coords);
  std::vector<geo::projected_point> pts;
  pts.reserve(stops.size());
  for (auto const& s : stops) {
    pts.push_back(proj.project(s.position(), s.stop_id));
  }
  return analyze(pts, opt);
}

}  // namespace stopscape::nna
