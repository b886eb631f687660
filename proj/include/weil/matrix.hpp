#pragma once

#include <cstddef>
#include <vector>

#include "weil/mp.hpp"

namespace weil {

/// Dense row-major matrix of MpReal, every entry at the same precision.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, long bits);

  static Matrix identity(std::size_t n, long bits);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  long precision() const { return bits_; }

  MpReal& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const MpReal& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<MpReal> column(std::size_t j) const;
  Matrix transposed() const;
  MpReal frobenius() const;
  /// max |a_ij - a_ji|
  MpReal asymmetry() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  long bits_ = 64;
  std::vector<MpReal> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

MpReal dot(const std::vector<MpReal>& x, const std::vector<MpReal>& y);
MpReal norm2(const std::vector<MpReal>& x);

}  // namespace weil
