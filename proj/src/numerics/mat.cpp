#include "dcnn/mat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcnn/error.hpp"
#include "dcnn/simd.hpp"

namespace dcnn {

MatView::MatView(std::size_t r, std::size_t c, std::span<const double> d) : rows(r), cols(c), data(d) {
  require(d.size() == r * c, "MatView: data length does not match shape");
}

MatView::MatView(const Mat& m) : rows(m.rows()), cols(m.cols()), data(m.values()) {}

MatView MatView::row_block(std::size_t first, std::size_t count) const {
  require(first + count <= rows, "MatView::row_block: out of range");
  return {count, cols, data.subspan(first * cols, count * cols)};
}

MatSpan::MatSpan(std::size_t r, std::size_t c, std::span<double> d) : rows(r), cols(c), data(d) {
  require(d.size() == r * c, "MatSpan: data length does not match shape");
}

MatSpan::MatSpan(Mat& m) : rows(m.rows()), cols(m.cols()), data(m.values()) {}

MatSpan MatSpan::row_block(std::size_t first, std::size_t count) const {
  require(first + count <= rows, "MatSpan::row_block: out of range");
  return {count, cols, data.subspan(first * cols, count * cols)};
}

Mat::Mat(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  require(data_.size() == rows * cols,
          "Mat: expected " + std::to_string(rows * cols) + " values, got " + std::to_string(data_.size()));
}

Mat Mat::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  Mat out(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r].size() == cols, "Mat::from_rows: ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), out.row(r).begin());
  }
  return out;
}

MatView Mat::row_block(std::size_t first, std::size_t count) const {
  require(first + count <= rows_, "Mat::row_block: out of range");
  return {count, cols_, std::span<const double>(data_).subspan(first * cols_, count * cols_)};
}

MatSpan Mat::row_block(std::size_t first, std::size_t count) {
  require(first + count <= rows_, "Mat::row_block: out of range");
  return {count, cols_, std::span<double>(data_).subspan(first * cols_, count * cols_)};
}

void Mat::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Mat& Mat::operator+=(const Mat& o) {
  require(same_shape(o), "Mat::operator+=: shape mismatch");
  simd::axpy(1.0, o.values(), values());
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

bool Mat::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Mat::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

Mat tanh_map(MatView m) {
  Mat out(m.rows, m.cols);
  auto dst = out.values();
  for (std::size_t i = 0; i < m.data.size(); ++i) dst[i] = std::tanh(m.data[i]);
  return out;
}

double max_abs_diff(MatView a, MatView b) {
  require(a.rows == b.rows && a.cols == b.cols, "max_abs_diff: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  return worst;
}

}  // namespace dcnn
