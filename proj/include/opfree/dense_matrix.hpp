#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace opfree {

/// Real dense matrix in row-major order.
///
/// Constructors that take entries reject NaN/Inf. Element access through
/// operator() is unchecked beyond a debug assert.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> d);
  static DenseMatrix column_vector(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept;
  double operator()(std::size_t i, std::size_t j) const noexcept;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> row(std::size_t i) noexcept;
  std::span<const double> row(std::size_t i) const noexcept;

  std::vector<double> column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);

  /// Copy of columns [first, first + count).
  DenseMatrix columns(std::size_t first, std::size_t count) const;
  /// Copy of the sub-block starting at (r0, c0).
  DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

  DenseMatrix transpose() const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double alpha) noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double alpha, DenseMatrix a);

/// a * b
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// aᵀ * b without forming the transpose.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
/// a * v
std::vector<double> matvec(const DenseMatrix& a, std::span<const double> v);
/// aᵀa, symmetric, accumulated row by row.
DenseMatrix gram(const DenseMatrix& a);

double frobenius_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);
double norm2(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace opfree
