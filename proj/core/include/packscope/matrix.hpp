#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace packscope {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool empty() const noexcept { return rows_ == 0; }

  [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
  [[nodiscard]] std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  [[nodiscard]] double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  [[nodiscard]] double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

  [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

  /// Appends a row; the first row fixes the column count.
  void push_row(std::span<const double> values);

  /// Rows picked by index, in the given order (repeats allowed).
  [[nodiscard]] Matrix select_rows(std::span<const std::size_t> indices) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace packscope
