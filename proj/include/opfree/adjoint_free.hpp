#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "opfree/dense_matrix.hpp"
#include "opfree/linalg.hpp"
#include "opfree/pde.hpp"
#include "opfree/rng.hpp"

namespace opfree::adjoint_free {

/// Forward responses u_k = A φ_k for the first N prior eigenfunctions, in the
/// same sqrt(quad_weight) scaling as the basis.
struct ResponseMatrix {
  std::vector<double> lambdas;    // λ_1..λ_N of the queried modes
  DenseMatrix columns;            // grid.size() x N
  std::vector<double> residuals;  // relative solve residual per column
  pde::Grid grid;

  std::size_t n_queries() const noexcept { return columns.cols(); }
};

struct ConvergenceRow {
  std::size_t n = 0;
  double lambda_next = 0.0;  // λ_{n+1}
  double err = 0.0;          // ‖Â − ÂP_n‖ = σ_max([u_{n+1} … u_N])
  double m_norm = 0.0;       // σ_max([λ_1 u_1 … λ_n u_n])
  double bound = 0.0;        // m_norm_final / λ_{n+1}
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double m_norm_final = 0.0;  // ‖M_N‖, the reported estimate of ‖L A*‖
  std::size_t n_queries = 0;
};

struct SweepRow {
  double c_mag = 0.0;
  double err_at_n = 0.0;
  double m_norm_final = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::size_t n_fixed = 0;
};

/// Tolerances for the power iterations behind every table entry.
struct StudyOptions {
  PowerOptions power{1e-10, 10000, 4};
  Seed seed{};
  unsigned threads = 1;
};

/// Solves A u_k = φ_k for k = 1..n_queries. Columns are independent of the
/// thread count; solver errors are rethrown naming the offending k.
ResponseMatrix query_forward(const pde::DiscreteOperator& op, const pde::EigenBasis& basis,
                             std::size_t n_queries, unsigned threads = 1);

/// Synthetic responses of the pseudo-inverse L†: u_k = φ_k / λ_k.
/// Throws ZeroEigenvalue if any queried λ_k is zero.
ResponseMatrix pseudo_inverse_reference(const pde::EigenBasis& basis, std::size_t n_queries);

/// Wraps caller-provided responses (columns must match lambdas).
ResponseMatrix make_response_matrix(DenseMatrix columns, std::vector<double> lambdas);

/// err(n) for each n in n_list (ascending, 1 <= n < N): spectral norm of the
/// trailing block [u_{n+1} … u_N]. Fills n, lambda_next and err; m_norm and
/// bound are left at zero. Throws EmptyTail for n >= N.
ConvergenceTable error_curve(const ResponseMatrix& resp, const std::vector<std::size_t>& n_list,
                             const StudyOptions& opts = {});

struct LastarCurve {
  std::vector<double> m_norm;  // one per entry of n_list
  double m_norm_final = 0.0;   // at n = N
};

/// m_norm(n) = σ_max([λ_1 u_1 … λ_n u_n]) for each n in n_list, plus n = N.
/// Nondecreasing in n by construction (warm-started nested iterations).
LastarCurve lastar_curve(const ResponseMatrix& resp, const std::vector<std::size_t>& n_list,
                         const StudyOptions& opts = {});

/// error_curve + lastar_curve, with bound = m_norm_final / λ_{n+1}.
ConvergenceTable convergence_study(const ResponseMatrix& resp,
                                   const std::vector<std::size_t>& n_list,
                                   const StudyOptions& opts = {});

struct CertificateReport {
  bool passed = true;
  double worst_ratio = 0.0;  // max over rows of err / bound (0 when both vanish)
  std::size_t worst_n = 0;
};

/// Checks err(n) <= m_norm_final / λ_{n+1} · (1 + 1e-8) on every row.
CertificateReport bound_certificate(const ConvergenceTable& table);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of y = slope·x + intercept with coefficient of determination.
RateFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log err against log n over rows with n in [n_min, n_max] and
/// err > 1e-13. Needs at least five such rows (InsufficientData).
RateFit rate_fit(const ConvergenceTable& table, std::size_t n_min, std::size_t n_max);

/// For each c (nonnegative, strictly increasing): −u″ + c u′ on grid, N
/// queries, err at n_fixed and the final m_norm. Péclet violations are
/// reported for the smallest offending c before any work is done.
SweepTable perturbation_sweep(const std::vector<double>& c_values, std::size_t n_fixed,
                              std::size_t n_queries, const pde::Grid& grid,
                              const StudyOptions& opts = {});

struct GreensErrorRow {
  std::size_t n = 0;
  double rel_l2_error = 0.0;
};

/// ‖G_n − G_exact‖_F / ‖G_exact‖_F on the grid nodes, where G_n is the kernel
/// of A P_n for −u″ + c u′ reconstructed from forward responses.
std::vector<GreensErrorRow> greens_error_study(double c, const std::vector<std::size_t>& n_list,
                                               const pde::Grid& grid, unsigned threads = 1);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Powers of two below n_queries followed by n_queries − 1.
std::vector<std::size_t> default_n_list(std::size_t n_queries);

/// CSV with header `n,lambda_next,err,m_norm,bound`, 17 significant digits.
void write_csv(std::ostream& os, const ConvergenceTable& table);
/// CSV with header `c_mag,err_at_n,m_norm_final`, 17 significant digits.
void write_csv(std::ostream& os, const SweepTable& table);
/// CSV with header `n,rel_l2_error`.
void write_csv(std::ostream& os, const std::vector<GreensErrorRow>& rows);

void write_json(std::ostream& os, const ConvergenceTable& table);
void write_json(std::ostream& os, const SweepTable& table);
void write_json(std::ostream& os, const std::vector<GreensErrorRow>& rows);

}  // namespace opfree::adjoint_free
