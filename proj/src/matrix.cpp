#include "weil/matrix.hpp"

#include <stdexcept>

namespace weil {

Matrix::Matrix(std::size_t rows, std::size_t cols, long bits) : rows_(rows), cols_(cols), bits_(bits) {
  data_.reserve(rows * cols);
  for (std::size_t k = 0; k < rows * cols; ++k) data_.emplace_back(bits);
}

Matrix Matrix::identity(std::size_t n, long bits) {
  Matrix m(n, n, bits);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = MpReal(1L, bits);
  return m;
}

std::vector<MpReal> Matrix::column(std::size_t j) const {
  std::vector<MpReal> c;
  c.reserve(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c.push_back((*this)(i, j));
  return c;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_, bits_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

MpReal Matrix::frobenius() const {
  MpReal s(bits_);
  for (const auto& x : data_) s += x * x;
  return sqrt(s);
}

MpReal Matrix::asymmetry() const {
  MpReal worst(bits_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j) worst = max(worst, abs((*this)(i, j) - (*this)(j, i)));
  return worst;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  Matrix c(a.rows(), b.cols(), std::max(a.precision(), b.precision()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      MpReal s(c.precision());
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = std::move(s);
    }
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix difference: shape mismatch");
  Matrix c(a.rows(), a.cols(), std::max(a.precision(), b.precision()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

MpReal dot(const std::vector<MpReal>& x, const std::vector<MpReal>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
  MpReal s(x.empty() ? 64 : x.front().precision());
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

MpReal norm2(const std::vector<MpReal>& x) { return sqrt(dot(x, x)); }

}  // namespace weil
