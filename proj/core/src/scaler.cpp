#include <cmath>

#include "packscope/classifiers.hpp"
#include "packscope/error.hpp"

namespace packscope {

StandardScaler::StandardScaler(std::vector<double> mean, std::vector<double> stddev)
    : mean_(std::move(mean)), stddev_(std::move(stddev)) {
  if (mean_.size() != stddev_.size()) throw Error(ErrorCode::DimensionMismatch, "scaler mean/std length mismatch");
}

std::vector<double> StandardScaler::apply(std::span<const double> row) const {
  if (row.size() != mean_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(mean_.size()) + " features, got " +
                                                  std::to_string(row.size()));
  }
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    out[j] = stddev_[j] > 0.0 ? (row[j] - mean_[j]) / stddev_[j] : 0.0;
  }
  return out;
}

Matrix StandardScaler::apply(const Matrix& rows) const {
  Matrix out(rows.rows(), rows.cols());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    const auto scaled = apply(rows.row(i));
    std::copy(scaled.begin(), scaled.end(), out.row(i).begin());
  }
  return out;
}

StandardScaler fit_scaler(const Matrix& train) {
  if (train.rows() == 0) throw Error(ErrorCode::EmptyTrainingSet, "cannot fit a scaler on zero rows");
  const std::size_t d = train.cols();
  const double n = static_cast<double>(train.rows());
  std::vector<double> mean(d, 0.0);
  std::vector<double> stddev(d, 0.0);
  for (std::size_t i = 0; i < train.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += train(i, j);
  }
  for (auto& m : mean) m /= n;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = train(i, j) - mean[j];
      stddev[j] += dev * dev;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    stddev[j] = std::sqrt(stddev[j] / n);
    // Rounding noise on a constant column counts as zero variance.
    if (stddev[j] <= 1e-12 * std::max(1.0, std::abs(mean[j]))) stddev[j] = 0.0;
  }
  return {std::move(mean), std::move(stddev)};
}

std::vector<double> apply_scaler(const StandardScaler& scaler, std::span<const double> row) {
  return scaler.apply(row);
}

}  // namespace packscope
