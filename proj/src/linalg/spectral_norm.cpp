#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "opfree/error.hpp"
#include "opfree/linalg.hpp"

namespace opfree {

namespace {

// Modified Gram–Schmidt with a second pass. Columns that collapse (the
// operator has rank below the block size) are replaced by fresh random
// directions so the block keeps full rank; column order is preserved, so the
// span of the leading nonzero columns is kept.
void orthonormalize_block(DenseMatrix& q, Rng& rng) {
  const std::size_t n = q.rows();
  const std::size_t b = q.cols();
  std::vector<std::vector<double>> cols(b);
  for (std::size_t j = 0; j < b; ++j) cols[j] = q.column(j);

  for (std::size_t j = 0; j < b; ++j) {
    auto& w = cols[j];
    for (int attempt = 0;; ++attempt) {
      const double before = norm2(w);
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t p = 0; p < j; ++p) {
          const double proj = dot(cols[p], w);
          for (std::size_t i = 0; i < n; ++i) w[i] -= proj * cols[p][i];
        }
      }
      const double after = norm2(w);
      if (after > 1e-10 * before && after > 0.0) {
        for (double& x : w) x /= after;
        break;
      }
      if (attempt > 8) {
        throw Error(ErrorKind::ConvergenceFailure, "linalg",
                    "power iteration: cannot complete an orthonormal block");
      }
      for (double& x : w) x = rng.normal();
    }
  }
  for (std::size_t j = 0; j < b; ++j) q.set_column(j, cols[j]);
}

using BlockApply = std::function<DenseMatrix(const DenseMatrix&)>;

NormEstimate blocked_power(std::size_t dim, const BlockApply& apply, const PowerOptions& opts,
                           Seed seed, const std::vector<double>& warm_start) {
  if (!(opts.tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "linalg", "spectral_norm: tol must be positive");
  }
  if (dim == 0) return {};
  const std::size_t b = std::clamp<std::size_t>(opts.block, 1, dim);
  Rng rng(seed);
  DenseMatrix q = gaussian_matrix(dim, b, rng);
  if (!warm_start.empty()) {
    if (warm_start.size() != dim) {
      throw Error(ErrorKind::DimensionMismatch, "linalg",
                  "spectral_norm: warm start length does not match the operator");
    }
    if (norm2(warm_start) > 0.0) q.set_column(0, warm_start);
  }
  orthonormalize_block(q, rng);

  // A warm start that is an exact but non-dominant eigenvector freezes the top
  // Ritz value while the random columns are still climbing toward the true
  // maximum, so the second value must also have settled, to sqrt(tol).
  const std::size_t watched = std::min<std::size_t>(2, b);
  const double tol_second = std::sqrt(opts.tol);
  std::vector<double> previous;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    DenseMatrix z = apply(q);
    DenseMatrix h = matmul_tn(q, z);
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = 0; j < i; ++j) h(i, j) = h(j, i) = 0.5 * (h(i, j) + h(j, i));

    // h is symmetric positive semidefinite, so its singular triplets are
    // its eigenpairs.
    const SVDTriple ritz = svd(h);
    const double estimate = std::sqrt(std::max(ritz.s.front(), 0.0));
    DenseMatrix rotated = matmul(q, ritz.v);

    bool settled = !previous.empty();
    for (std::size_t i = 0; settled && i < watched; ++i)
      settled = std::abs(ritz.s[i] - previous[i]) <= (i == 0 ? opts.tol : tol_second) * ritz.s.front();
    if (estimate == 0.0 || settled) return {estimate, rotated.column(0), it};
    previous.assign(ritz.s.begin(), ritz.s.begin() + watched);
    q = matmul(z, ritz.v);
    orthonormalize_block(q, rng);
  }
  throw Error(ErrorKind::ConvergenceFailure, "linalg",
              "spectral_norm: no convergence to relative tolerance " + std::to_string(opts.tol) +
                  " within " + std::to_string(opts.max_iter) + " iterations");
}

}  // namespace

double spectral_norm(const DenseMatrix& m, double tol, std::size_t max_iter, Seed seed) {
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "linalg", "spectral_norm: tol must be positive");
  }
  if (m.empty()) return 0.0;
  PowerOptions opts{tol, max_iter, 4};
  if (m.cols() <= m.rows()) {
    auto apply = [&m](const DenseMatrix& q) { return matmul_tn(m, matmul(m, q)); };
    return blocked_power(m.cols(), apply, opts, seed, {}).value;
  }
  auto apply = [&m](const DenseMatrix& q) { return matmul(m, matmul_tn(m, q)); };
  return blocked_power(m.rows(), apply, opts, seed, {}).value;
}

NormEstimate gram_spectral_norm(const DenseMatrix& g, const PowerOptions& opts, Seed seed,
                                const std::vector<double>& warm_start) {
  if (g.rows() != g.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "linalg", "gram_spectral_norm: g must be square");
  }
  auto apply = [&g](const DenseMatrix& q) { return matmul(g, q); };
  return blocked_power(g.rows(), apply, opts, seed, warm_start);
}

std::vector<double> principal_angles(const DenseMatrix& u, const DenseMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "linalg",
                "principal_angles: shapes " + std::to_string(u.rows()) + "x" +
                    std::to_string(u.cols()) + " and " + std::to_string(v.rows()) + "x" +
                    std::to_string(v.cols()) + " differ");
  }
  const std::size_t k = u.cols();
  if (k == 0) return {};

  // Fix a canonical argument order so that swapping u and v runs the same
  // floating-point computation.
  const bool swap = std::lexicographical_compare(v.data().begin(), v.data().end(),
                                                 u.data().begin(), u.data().end());
  const DenseMatrix& a = swap ? v : u;
  const DenseMatrix& b = swap ? u : v;

  const DenseMatrix m = matmul_tn(a, b);
  const auto cosines = singular_values(m);
  const DenseMatrix residual = b - matmul(a, m);
  const auto sines = singular_values(residual);  // descending

  std::vector<double> angles(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double from_cos = std::acos(std::clamp(cosines[i], 0.0, 1.0));
    if (from_cos < 0.25 * M_PI) {
      angles[i] = std::asin(std::clamp(sines[k - 1 - i], 0.0, 1.0));
    } else {
      angles[i] = from_cos;
    }
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

}  // namespace opfree
