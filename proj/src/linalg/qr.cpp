#include <cmath>
#include <string>

#include "opfree/error.hpp"
#include "opfree/linalg.hpp"

namespace opfree {

QrFactors qr_factor(const DenseMatrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (cols > rows) {
    throw Error(ErrorKind::RankDeficient, "linalg",
                "qr_factor: " + std::to_string(cols) + " columns exceed " +
                    std::to_string(rows) + " rows");
  }
  const double tol = 1e-12 * frobenius_norm(m);

  DenseMatrix r = m;
  // Householder vectors, one per column, stored densely (v[j] has rows - j entries).
  std::vector<std::vector<double>> reflectors(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    std::vector<double> v(rows - j);
    for (std::size_t i = j; i < rows; ++i) v[i - j] = r(i, j);
    const double xnorm = norm2(v);
    if (!(xnorm > tol)) {
      throw Error(ErrorKind::RankDeficient, "linalg",
                  "qr_factor: column " + std::to_string(j) + " is numerically dependent");
    }
    const double alpha = v[0] >= 0.0 ? -xnorm : xnorm;
    v[0] -= alpha;
    const double vnorm = norm2(v);
    for (double& x : v) x /= vnorm;

    for (std::size_t c = j; c < cols; ++c) {
      double proj = 0.0;
      for (std::size_t i = j; i < rows; ++i) proj += v[i - j] * r(i, c);
      proj *= 2.0;
      for (std::size_t i = j; i < rows; ++i) r(i, c) -= proj * v[i - j];
    }
    r(j, j) = alpha;
    for (std::size_t i = j + 1; i < rows; ++i) r(i, j) = 0.0;
    reflectors[j] = std::move(v);
  }

  // Q = H_0 H_1 ... H_{n-1} applied to the first `cols` columns of I.
  DenseMatrix q(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) q(j, j) = 1.0;
  for (std::size_t jj = cols; jj-- > 0;) {
    const auto& v = reflectors[jj];
    for (std::size_t c = 0; c < cols; ++c) {
      double proj = 0.0;
      for (std::size_t i = jj; i < rows; ++i) proj += v[i - jj] * q(i, c);
      if (proj == 0.0) continue;
      proj *= 2.0;
      for (std::size_t i = jj; i < rows; ++i) q(i, c) -= proj * v[i - jj];
    }
  }

  DenseMatrix rr(cols, cols);
  for (std::size_t i = 0; i < cols; ++i) {
    const double sign = r(i, i) < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = i; c < cols; ++c) rr(i, c) = sign * r(i, c);
    if (sign < 0.0)
      for (std::size_t k = 0; k < rows; ++k) q(k, i) = -q(k, i);
  }
  return {std::move(q), std::move(rr)};
}

DenseMatrix orthonormalize(const DenseMatrix& m) { return qr_factor(m).q; }

DenseMatrix random_orthonormal(std::size_t n, std::size_t k, Rng& rng) {
  return qr_factor(gaussian_matrix(n, k, rng)).q;
}

}  // namespace opfree
