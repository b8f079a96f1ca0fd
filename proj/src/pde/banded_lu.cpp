#include <algorithm>
#include <cmath>
#include <string>

#include "opfree/error.hpp"
#include "opfree/pde.hpp"

namespace opfree::pde {

BandMatrix::BandMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), data_(n * (kl + ku + 1), 0.0) {}

double& BandMatrix::at(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_ || j + kl_ < i || j > i + ku_) {
    throw Error(ErrorKind::DimensionMismatch, "pde",
                "band entry (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") outside the band");
  }
  return data_[i * (kl_ + ku_ + 1) + (j + kl_ - i)];
}

double BandMatrix::get(std::size_t i, std::size_t j) const noexcept {
  if (i >= n_ || j >= n_ || j + kl_ < i || j > i + ku_) return 0.0;
  return data_[i * (kl_ + ku_ + 1) + (j + kl_ - i)];
}

std::vector<double> BandMatrix::apply(std::span<const double> x) const {
  if (x.size() != n_) throw Error(ErrorKind::DimensionMismatch, "pde", "band apply: length mismatch");
  std::vector<double> y(n_, 0.0);
  const std::size_t w = kl_ + ku_ + 1;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > kl_ ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    const double* row = data_.data() + i * w;
    double s = 0.0;
    for (std::size_t j = j0; j <= j1; ++j) s += row[j + kl_ - i] * x[j];
    y[i] = s;
  }
  return y;
}

std::vector<double> BandMatrix::residual(std::span<const double> x,
                                         std::span<const double> b) const {
  if (x.size() != n_ || b.size() != n_) {
    throw Error(ErrorKind::DimensionMismatch, "pde", "band residual: length mismatch");
  }
  std::vector<double> r(n_);
  const std::size_t w = kl_ + ku_ + 1;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > kl_ ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    const double* row = data_.data() + i * w;
    long double s = b[i];
    for (std::size_t j = j0; j <= j1; ++j)
      s -= static_cast<long double>(row[j + kl_ - i]) * static_cast<long double>(x[j]);
    r[i] = static_cast<double>(s);
  }
  return r;
}

double BandMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

DenseMatrix BandMatrix::to_dense() const {
  DenseMatrix d(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > kl_ ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    for (std::size_t j = j0; j <= j1; ++j) d(i, j) = get(i, j);
  }
  return d;
}

BandedLu::BandedLu(const BandMatrix& a)
    : n_(a.size()),
      kl_(a.lower()),
      ku_(a.upper()),
      width_(2 * a.lower() + a.upper() + 1),
      data_(a.size() * (2 * a.lower() + a.upper() + 1), 0.0),
      pivots_(a.size()) {
  const std::size_t kuf = ku_ + kl_;  // upper bandwidth after fill-in
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > kl_ ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    for (std::size_t j = j0; j <= j1; ++j) lu(i, j) = a.get(i, j);
  }
  const double tiny = 1e-14 * a.max_abs();

  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t last_row = std::min(n_ - 1, k + kl_);
    const std::size_t last_col = std::min(n_ - 1, k + kuf);
    std::size_t p = k;
    for (std::size_t i = k + 1; i <= last_row; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
    pivots_[k] = p;
    if (!(std::abs(lu(p, k)) > tiny)) {
      throw Error(ErrorKind::SingularOperator, "pde",
                  "banded LU: pivot " + std::to_string(k) + " below 1e-14 * max|A|");
    }
    if (p != k)
      for (std::size_t j = k; j <= last_col; ++j) std::swap(lu(k, j), lu(p, j));

    const double inv_pivot = 1.0 / lu(k, k);
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      const double l = lu(i, k) * inv_pivot;
      lu(i, k) = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j <= last_col; ++j) lu(i, j) -= l * lu(k, j);
    }
  }
}

std::vector<double> BandedLu::solve(std::span<const double> rhs) const {
  if (rhs.size() != n_) {
    throw Error(ErrorKind::DimensionMismatch, "pde",
                "solve: right-hand side has " + std::to_string(rhs.size()) + " entries, expected " +
                    std::to_string(n_));
  }
  std::vector<double> x(rhs.begin(), rhs.end());
  for (std::size_t k = 0; k < n_; ++k) {
    if (pivots_[k] != k) std::swap(x[k], x[pivots_[k]]);
    const double xk = x[k];
    if (xk == 0.0) continue;
    const std::size_t last_row = std::min(n_ - 1, k + kl_);
    for (std::size_t i = k + 1; i <= last_row; ++i) x[i] -= lu(i, k) * xk;
  }
  const std::size_t kuf = ku_ + kl_;
  for (std::size_t i = n_; i-- > 0;) {
    const std::size_t last_col = std::min(n_ - 1, i + kuf);
    double s = x[i];
    for (std::size_t j = i + 1; j <= last_col; ++j) s -= lu(i, j) * x[j];
    x[i] = s / lu(i, i);
  }
  return x;
}

}  // namespace opfree::pde
