#include "stopscape/cluster/features.h"

#include <cmath>

#include "stopscape/error.h"

namespace stopscape::cluster {

standardized_features zscore(feature_matrix const& raw,
                             std::vector<std::string> row_ids) {
  auto const n = raw.rows();
  auto const d = raw.cols();
  if (n < 2) {
    throw domain_error{"z-score standardization needs at least 2 rows"};
  }
  if (!row_ids.empty() && row_ids.size() != n) {
    throw domain_error{"row_ids size does not match the feature matrix"};
  }

  standardized_features out{std::move(row_ids), feature_matrix{n, d},
                            std::vector<double>(d, 0.0),
                            std::vector<double>(d, 0.0),
                            std::vector<bool>(d, false)};
  auto const nd = static_cast<double>(n);
  for (auto j = 0U; j < d; ++j) {
    auto sum = 0.0;
    for (auto i = 0U; i < n; ++i) {
      sum += raw(i, j);
    }
    auto const mean = sum / nd;
    auto ss = 0.0;
    auto constant = true;
    for (auto i = 0U; i < n; ++i) {
      auto const c = raw(i, j) - mean;
      ss += c * c;
      constant = constant && raw(i, j) == raw(0, j);
    }
    auto const sigma = std::sqrt(ss / nd);
    out.means[j] = mean;
    out.stds[j] = sigma;
    out.constant_columns[j] = constant || !(sigma > 0.0);
    if (out.constant_columns[j]) {
      continue;
    }
    for (auto i = 0U; i < n; ++i) {
      out.matrix(i, j) = (raw(i, j) - mean) / sigma;
    }
  }
  return out;
}

std::vector<double> to_raw(standardized_features const& f,
                           std::span<double const> row) {
  std::vector<double> out(row.size());
  for (auto j = 0U; j < row.size(); ++j) {
    out[j] = f.constant_columns[j] ? f.means[j]
                                   : f.means[j] + row[j] * f.stds[j];
  }
  return out;
}

}  // namespace stopscape::cluster
