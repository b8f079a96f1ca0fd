#include "opfree/dense_matrix.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "opfree/error.hpp"

namespace opfree {

namespace {

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFinite, "linalg", "matrix entries must be finite");
    }
  }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "linalg",
                std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()) + " differ");
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorKind::DimensionMismatch, "linalg",
                "entry count " + std::to_string(data_.size()) + " does not match " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
  require_finite(data_);
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorKind::DimensionMismatch, "linalg", "ragged initializer list");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
  require_finite(d);
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

DenseMatrix DenseMatrix::column_vector(std::span<const double> v) {
  return DenseMatrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

double& DenseMatrix::operator()(std::size_t i, std::size_t j) noexcept {
  assert(i < rows_ && j < cols_);
  return data_[i * cols_ + j];
}

double DenseMatrix::operator()(std::size_t i, std::size_t j) const noexcept {
  assert(i < rows_ && j < cols_);
  return data_[i * cols_ + j];
}

std::span<double> DenseMatrix::row(std::size_t i) noexcept {
  return std::span<double>(data_).subspan(i * cols_, cols_);
}

std::span<const double> DenseMatrix::row(std::size_t i) const noexcept {
  return std::span<const double>(data_).subspan(i * cols_, cols_);
}

std::vector<double> DenseMatrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = data_[i * cols_ + j];
  return out;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> values) {
  if (values.size() != rows_ || j >= cols_) {
    throw Error(ErrorKind::DimensionMismatch, "linalg", "set_column: bad column or length");
  }
  for (std::size_t i = 0; i < rows_; ++i) data_[i * cols_ + j] = values[i];
}

DenseMatrix DenseMatrix::columns(std::size_t first, std::size_t count) const {
  return block(0, first, rows_, count);
}

DenseMatrix DenseMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                               std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) {
    throw Error(ErrorKind::DimensionMismatch, "linalg", "block out of range");
  }
  DenseMatrix out(nr, nc);
  for (std::size_t i = 0; i < nr; ++i) {
    const double* src = data_.data() + (r0 + i) * cols_ + c0;
    std::copy(src, src + nc, out.data_.data() + i * nc);
  }
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.data_[j * rows_ + i] = data_[i * cols_ + j];
  return t;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double alpha) noexcept {
  for (double& v : data_) v *= alpha;
  return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double alpha, DenseMatrix a) { return a *= alpha; }

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "linalg",
                "matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                    std::to_string(b.rows()) + " differ");
  }
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "linalg", "matmul_tn: row counts differ");
  }
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto ar = a.row(r);
    auto br = b.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ari = ar[i];
      if (ari == 0.0) continue;
      auto ci = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += ari * br[j];
    }
  }
  return c;
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> v) {
  if (a.cols() != v.size()) {
    throw Error(ErrorKind::DimensionMismatch, "linalg", "matvec: length mismatch");
  }
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), v);
  return out;
}

DenseMatrix gram(const DenseMatrix& a) {
  const std::size_t n = a.cols();
  DenseMatrix g(n, n);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto ar = a.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      const double ari = ar[i];
      if (ari == 0.0) continue;
      double* gi = g.row(i).data();
      for (std::size_t j = i; j < n; ++j) gi[j] += ari * ar[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

double frobenius_norm(const DenseMatrix& a) { return norm2(a.data()); }

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double norm2(std::span<const double> v) {
  // Scaled accumulation avoids overflow/underflow for extreme entries.
  double scale = 0.0;
  double ssq = 1.0;
  for (double x : v) {
    if (x == 0.0) continue;
    const double ax = std::abs(x);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace opfree
