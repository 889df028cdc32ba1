#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dcnn {

class Mat;

/// Read-only row-major view over a rows x cols block of doubles.
struct MatView {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<const double> data;

  MatView() = default;
  MatView(std::size_t r, std::size_t c, std::span<const double> d);
  MatView(const Mat& m);  // NOLINT(google-explicit-constructor)

  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return data.subspan(r * cols, cols); }
  std::size_t size() const { return rows * cols; }
  MatView row_block(std::size_t first, std::size_t count) const;
};

/// Mutable counterpart of MatView.
struct MatSpan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<double> data;

  MatSpan() = default;
  MatSpan(std::size_t r, std::size_t c, std::span<double> d);
  MatSpan(Mat& m);  // NOLINT(google-explicit-constructor)

  double& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) const { return data.subspan(r * cols, cols); }
  std::size_t size() const { return rows * cols; }
  MatSpan row_block(std::size_t first, std::size_t count) const;
  operator MatView() const { return {rows, cols, data}; }  // NOLINT(google-explicit-constructor)
};

/// Dense row-major matrix of doubles.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Mat from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& storage() const { return data_; }

  /// Rows [first, first+count) as a view; the block is contiguous in row-major order.
  MatView row_block(std::size_t first, std::size_t count) const;
  MatSpan row_block(std::size_t first, std::size_t count);

  void fill(double v);
  void set_zero() { fill(0.0); }
  bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  Mat& operator+=(const Mat& o);
  Mat& operator*=(double s);

  bool all_finite() const;
  double sum() const;

  friend bool operator==(const Mat& a, const Mat& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Element-wise hyperbolic tangent.
Mat tanh_map(MatView m);

double max_abs_diff(MatView a, MatView b);

}  // namespace dcnn
