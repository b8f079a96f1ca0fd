#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "opfree/adjoint_free.hpp"
#include "opfree/error.hpp"

namespace opfree::adjoint_free {

SweepTable perturbation_sweep(const std::vector<double>& c_values, std::size_t n_fixed,
                              std::size_t n_queries, const pde::Grid& grid,
                              const StudyOptions& opts) {
  if (c_values.empty()) {
    throw Error(ErrorKind::InvalidArgument, "adjoint-free", "perturbation_sweep: no c values");
  }
  for (std::size_t i = 0; i < c_values.size(); ++i) {
    if (!std::isfinite(c_values[i]) || c_values[i] < 0.0 ||
        (i > 0 && c_values[i] <= c_values[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "adjoint-free",
                  "perturbation_sweep: c values must be nonnegative and strictly increasing");
    }
  }
  if (n_fixed == 0 || n_fixed >= n_queries) {
    throw Error(ErrorKind::EmptyTail, "adjoint-free",
                "perturbation_sweep: n_fixed = " + std::to_string(n_fixed) +
                    " must lie in [1, n_queries)");
  }
  if (grid.dim != 1) {
    throw Error(ErrorKind::InvalidArgument, "adjoint-free", "perturbation_sweep needs a 1D grid");
  }
  // Values are ascending, so the first offender is the smallest one.
  for (double c : c_values) {
    const double peclet = c * grid.h / 2.0;
    if (!(peclet < 1.0)) {
      std::ostringstream msg;
      msg << "perturbation_sweep: c = " << c << " gives grid Peclet number " << peclet
          << " >= 1 on " << grid.points_per_axis << " points";
      throw Error(ErrorKind::PecletViolation, "adjoint-free", msg.str());
    }
  }

  const pde::EigenBasis basis = pde::sine_basis_1d(n_queries, grid);
  SweepTable table;
  table.n_fixed = n_fixed;
  for (double c : c_values) {
    const auto op = pde::assemble_1d(-1.0, c, 0.0, grid);
    const ResponseMatrix resp = query_forward(op, basis, n_queries, opts.threads);
    const ConvergenceTable curve = error_curve(resp, {n_fixed}, opts);
    const LastarCurve lastar = lastar_curve(resp, {}, opts);
    table.rows.push_back({c, curve.rows.front().err, lastar.m_norm_final});
  }
  return table;
}

std::vector<GreensErrorRow> greens_error_study(double c, const std::vector<std::size_t>& n_list,
                                               const pde::Grid& grid, unsigned threads) {
  if (n_list.empty()) {
    throw Error(ErrorKind::InvalidArgument, "adjoint-free", "greens_error_study: empty n_list");
  }
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0 || (i > 0 && n_list[i] <= n_list[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "adjoint-free",
                  "greens_error_study: n_list must be positive and strictly ascending");
    }
  }
  const auto op = pde::assemble_1d(-1.0, c, 0.0, grid);
  const pde::EigenBasis basis = pde::sine_basis_1d(n_list.back(), grid);
  const ResponseMatrix resp = query_forward(op, basis, n_list.back(), threads);
  const pde::GreensSample exact = pde::greens_exact_sample(c, grid);
  const double exact_norm = frobenius_norm(exact.values);

  // G_n grows by rank-one terms u_k φ_kᵀ / w, so accumulate across n.
  const std::size_t m = grid.points_per_axis;
  DenseMatrix kernel(m, m);
  const double inv_w = 1.0 / grid.quad_weight;
  std::vector<GreensErrorRow> rows;
  std::size_t done = 0;
  for (std::size_t n : n_list) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto ui = resp.columns.row(i);
      auto gi = kernel.row(i);
      for (std::size_t j = 0; j < m; ++j) {
        const auto pj = basis.phis.row(j);
        double s = 0.0;
        for (std::size_t k = done; k < n; ++k) s += ui[k] * pj[k];
        gi[j] += s * inv_w;
      }
    }
    done = n;
    double diff = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const double d = kernel(i, j) - exact.values(i, j);
        diff += d * d;
      }
    rows.push_back({n, std::sqrt(diff) / exact_norm});
  }
  return rows;
}

}  // namespace opfree::adjoint_free
