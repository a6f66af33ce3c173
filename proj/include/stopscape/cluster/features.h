#pragma once

#include <span>
#include <string>
#include <vector>

namespace stopscape::cluster {

// Dense row-major matrix of observations x features.
class feature_matrix {
public:
  feature_matrix() = default;
  feature_matrix(std::size_t rows, std::size_t cols)
      : rows_{rows}, cols_{cols}, data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double const> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  friend bool operator==(feature_matrix const&,
                         feature_matrix const&) = default;

private:
  std::size_t rows_{0};
  std::size_t cols_{0};
  std::vector<double> data_;
};

struct standardized_features {
  std::vector<std::string> row_ids;
  feature_matrix matrix;
  std::vector<double> means;
  std::vector<double> stds;  // population standard deviation of raw columns
  std::vector<bool> constant_columns;
};

// Per-column z-score with population standard deviation. A constant column
// becomes all zeros and is flagged. Throws domain_error for fewer than 2 rows
// or a row_ids size mismatch (empty row_ids are allowed).
standardized_features zscore(feature_matrix const& raw,
                             std::vector<std::string> row_ids = {});

// Inverse transform of one standardized row (constant columns map to the
// column mean).
std::vector<double> to_raw(standardized_features const&,
                           std::span<double const> standardized_row);

inline double squared_distance(std::span<double const> a,
                               std::span<double const> b) {
  auto d = 0.0;
  for (auto j = 0U; j < a.size(); ++j) {
    auto const diff = a[j] - b[j];
    d += diff * diff;
  }
  return d;
}

}  // namespace stopscape::cluster
