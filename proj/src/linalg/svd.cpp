#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <string>

#include "opfree/error.hpp"
#include "opfree/linalg.hpp"

namespace opfree {

namespace {

constexpr int kMaxSweeps = 80;

// Column-major working storage for the Jacobi sweeps.
struct Columns {
  std::size_t len = 0;
  std::vector<std::vector<double>> col;
};

Columns to_columns(const DenseMatrix& a) {
  Columns c{a.rows(), std::vector<std::vector<double>>(a.cols(), std::vector<double>(a.rows()))};
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c.col[j][i] = a(i, j);
  return c;
}

// Extends `basis` (orthonormal vectors of length n) by canonical vectors
// orthogonalized against it, until it holds `target` vectors.
void complete_basis(std::vector<std::vector<double>>& basis, std::size_t n, std::size_t target) {
  for (std::size_t e = 0; e < n && basis.size() < target; ++e) {
    std::vector<double> w(n, 0.0);
    w[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double p = dot(b, w);
        for (std::size_t i = 0; i < n; ++i) w[i] -= p * b[i];
      }
    }
    const double nw = norm2(w);
    if (nw > 0.5) {
      for (double& x : w) x /= nw;
      basis.push_back(std::move(w));
    }
  }
}

// One-sided (Hestenes) Jacobi on a tall matrix: rotates columns of A until
// they are mutually orthogonal, accumulating the rotations in V.
SVDTriple jacobi_tall(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Columns w = to_columns(a);
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

  const double rel_tol = std::max(1e-15, std::sqrt(static_cast<double>(m)) * DBL_EPSILON);
  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        auto& wp = w.col[p];
        auto& wq = w.col[q];
        const double alpha = dot(wp, wp);
        const double beta = dot(wq, wq);
        const double gamma = dot(wp, wq);
        const double scale = std::sqrt(alpha) * std::sqrt(beta);
        if (gamma == 0.0 || !(scale > DBL_MIN)) continue;
        if (std::abs(gamma) <= rel_tol * scale) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double xp = wp[i];
          const double xq = wq[i];
          wp[i] = c * xp - s * xq;
          wq[i] = s * xp + c * xq;
        }
        auto& vp = v[p];
        auto& vq = v[q];
        for (std::size_t i = 0; i < n; ++i) {
          const double xp = vp[i];
          const double xq = vq[i];
          vp[i] = c * xp - s * xq;
          vq[i] = s * xp + c * xq;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    throw Error(ErrorKind::ConvergenceFailure, "linalg",
                "svd: Jacobi sweeps did not converge in " + std::to_string(kMaxSweeps) +
                    " sweeps");
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(w.col[j]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double smax = n > 0 ? sigma[order[0]] : 0.0;
  std::vector<std::vector<double>> ucols;
  std::vector<std::size_t> missing;
  std::vector<std::vector<double>> ordered_u(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t j = order[r];
    if (sigma[j] > 0.0 && sigma[j] > smax * 1e-150) {
      std::vector<double> u = w.col[j];
      for (double& x : u) x /= sigma[j];
      ordered_u[r] = u;
      ucols.push_back(std::move(u));
    } else {
      sigma[j] = sigma[j] > 0.0 ? sigma[j] : 0.0;
      missing.push_back(r);
    }
  }
  if (!missing.empty()) {
    const std::size_t have = ucols.size();
    complete_basis(ucols, m, n);
    for (std::size_t i = 0; i < missing.size(); ++i) ordered_u[missing[i]] = ucols[have + i];
  }

  SVDTriple out{DenseMatrix(m, n), std::vector<double>(n), DenseMatrix(n, n)};
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t j = order[r];
    const auto& u = ordered_u[r];
    // Sign convention: largest-magnitude entry of each U column is positive.
    std::size_t imax = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (std::abs(u[i]) > std::abs(u[imax])) imax = i;
    const double sign = (m > 0 && u[imax] < 0.0) ? -1.0 : 1.0;
    out.s[r] = sigma[j];
    for (std::size_t i = 0; i < m; ++i) out.u(i, r) = sign * u[i];
    for (std::size_t i = 0; i < n; ++i) out.v(i, r) = sign * v[j][i];
  }
  return out;
}

}  // namespace

SVDTriple svd(const DenseMatrix& m) {
  const std::size_t narrow = std::min(m.rows(), m.cols());
  if (narrow > kMaxDenseSvdDim) {
    throw Error(ErrorKind::InvalidArgument, "linalg",
                "svd: min(rows, cols) = " + std::to_string(narrow) + " exceeds " +
                    std::to_string(kMaxDenseSvdDim) + "; use spectral_norm for large inputs");
  }
  if (m.rows() >= m.cols()) return jacobi_tall(m);

  SVDTriple t = jacobi_tall(m.transpose());
  SVDTriple out{std::move(t.v), std::move(t.s), std::move(t.u)};
  // Re-apply the sign convention to the new U (formerly V).
  for (std::size_t r = 0; r < out.s.size(); ++r) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < out.u.rows(); ++i)
      if (std::abs(out.u(i, r)) > std::abs(out.u(imax, r))) imax = i;
    if (out.u.rows() > 0 && out.u(imax, r) < 0.0) {
      for (std::size_t i = 0; i < out.u.rows(); ++i) out.u(i, r) = -out.u(i, r);
      for (std::size_t i = 0; i < out.v.rows(); ++i) out.v(i, r) = -out.v(i, r);
    }
  }
  return out;
}

std::vector<double> singular_values(const DenseMatrix& m) { return svd(m).s; }

double spectral_norm_exact(const DenseMatrix& m) {
  if (m.empty()) return 0.0;
  return svd(m).s.front();
}

std::size_t numerical_rank(const DenseMatrix& m, double tol) {
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "linalg", "numerical_rank: tol must be positive");
  }
  if (m.empty()) return 0;
  const auto s = singular_values(m);
  if (s.front() == 0.0) return 0;
  const double cut = tol * s.front();
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [cut](double x) { return x > cut; }));
}

}  // namespace opfree
