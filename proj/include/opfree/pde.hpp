#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "opfree/dense_matrix.hpp"

namespace opfree::pde {

/// Uniform grid of interior nodes on [0,1] or [0,1]²; Dirichlet boundary
/// values are implicit zeros. 2D nodes are ordered x-fastest:
/// index = iy * points_per_axis + ix.
struct Grid {
  int dim = 1;
  std::size_t points_per_axis = 0;
  double h = 0.0;
  double quad_weight = 0.0;  // h^dim

  std::size_t size() const noexcept;
  /// Coordinate of interior node i along one axis, (i + 1) h.
  double coord(std::size_t i) const noexcept { return static_cast<double>(i + 1) * h; }
};

Grid make_grid(int dim, std::size_t points_per_axis);

/// Discrete L² inner product quad_weight · Σ f_i g_i.
double inner_product(const Grid& grid, std::span<const double> f, std::span<const double> g);

/// Dirichlet-Laplacian eigenpairs sampled on a grid. Column k of phis is φ_k
/// at the nodes scaled by sqrt(quad_weight), so Euclidean norms of sampled
/// functions are discrete L² norms.
struct EigenBasis {
  Grid grid;
  std::size_t modes = 0;
  std::vector<double> lambdas;  // ascending
  DenseMatrix phis;             // grid.size() x modes
  /// Frequency pair (i, j) of each mode; j = 0 in 1D.
  std::vector<std::pair<int, int>> frequencies;
};

/// φ_k(x) = √2 sin(kπx), λ_k = π²k², k = 1..n_modes.
/// Requires n_modes < points_per_axis / 2, else Underresolved.
EigenBasis sine_basis_1d(std::size_t n_modes, const Grid& grid);

/// φ_ij = 2 sin(iπx) sin(jπy), λ = π²(i² + j²), sorted by λ with ties broken by
/// (i, j). Frequencies per axis must stay below points_per_axis / 2.
EigenBasis sine_basis_2d(std::size_t n_modes, const Grid& grid);

/// Square banded matrix with kl sub- and ku super-diagonals.
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(std::size_t n, std::size_t kl, std::size_t ku);

  std::size_t size() const noexcept { return n_; }
  std::size_t lower() const noexcept { return kl_; }
  std::size_t upper() const noexcept { return ku_; }

  /// Entry (i, j); j - i must lie in [-kl, ku].
  double& at(std::size_t i, std::size_t j);
  double get(std::size_t i, std::size_t j) const noexcept;

  std::vector<double> apply(std::span<const double> x) const;
  /// b - A x accumulated in extended precision.
  std::vector<double> residual(std::span<const double> x, std::span<const double> b) const;
  double max_abs() const noexcept;
  DenseMatrix to_dense() const;

 private:
  std::size_t n_ = 0;
  std::size_t kl_ = 0;
  std::size_t ku_ = 0;
  std::vector<double> data_;  // row i holds columns i-kl .. i+ku
};

/// LU factorization with partial pivoting in band storage (upper bandwidth
/// grows to kl + ku). Throws SingularOperator when a pivot falls below
/// 1e-14 · max|A|.
class BandedLu {
 public:
  BandedLu() = default;
  explicit BandedLu(const BandMatrix& a);

  std::vector<double> solve(std::span<const double> rhs) const;
  std::size_t size() const noexcept { return n_; }

 private:
  double& lu(std::size_t i, std::size_t j) noexcept { return data_[i * width_ + (j + kl_ - i)]; }
  double lu(std::size_t i, std::size_t j) const noexcept {
    return data_[i * width_ + (j + kl_ - i)];
  }

  std::size_t n_ = 0;
  std::size_t kl_ = 0;
  std::size_t ku_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
  std::vector<std::size_t> pivots_;
};

/// Constant coefficients of nu·Δu + c·∇u + r·u.
struct Coefficients {
  double nu = -1.0;
  std::array<double, 2> c{0.0, 0.0};
  double r = 0.0;
};

struct SolveResult {
  std::vector<double> solution;
  /// Normwise backward error ‖b − A u‖∞ / (‖A‖∞ ‖u‖∞ + ‖b‖∞).
  double relative_residual = 0.0;
};

/// Centered second-order finite-difference discretization of
/// nu·Δ + c·∇ + r with zero Dirichlet data, factored once at construction.
/// Immutable afterwards; solve() may be called concurrently.
class DiscreteOperator {
 public:
  DiscreteOperator(const Grid& grid, const Coefficients& coeffs, BandMatrix band);

  const Grid& grid() const noexcept { return grid_; }
  const Coefficients& coefficients() const noexcept { return coeffs_; }
  const BandMatrix& band() const noexcept { return band_; }

  std::vector<double> apply(std::span<const double> u) const { return band_.apply(u); }

  /// Solution of A u = rhs by the cached LU, refined against extended-
  /// precision residuals. Throws SingularOperator if the backward error
  /// stays above 1e-10.
  SolveResult solve(std::span<const double> rhs) const;

 private:
  Grid grid_;
  Coefficients coeffs_;
  BandMatrix band_;
  BandedLu lu_;
  double a_norm_ = 0.0;  // ‖band‖∞
};

/// nu u″ + c u′ + r u on a 1D grid. Requires nu != 0 and grid Péclet number
/// |c| h / (2|nu|) < 1 (PecletViolation otherwise).
DiscreteOperator assemble_1d(double nu, double c, double r, const Grid& grid);

/// nu Δu + c·∇u + r u on a 2D grid (5-point Laplacian, centered first
/// differences); Péclet condition enforced per axis.
DiscreteOperator assemble_2d(double nu, std::array<double, 2> c, double r, const Grid& grid);

/// Convenience wrapper returning only the solution vector.
std::vector<double> solve(const DiscreteOperator& op, std::span<const double> rhs);

/// Green's function of −u″ + c u′ = f, u(0) = u(1) = 0, evaluated at (x, y).
/// For |c| < 1e-8 the analytic limit min(x,y)(1 − max(x,y)) is returned.
double greens_exact_convdiff(double c, double x, double y);

/// Kernel samples G(x_i, y_j) on a 1D grid.
struct GreensSample {
  Grid grid;
  DenseMatrix values;
  double c = 0.0;
};

/// Kernel of A P_n from responses u_k = A φ_k: G_n(x, y) = Σ_k u_k(x) φ_k(y),
/// i.e. responses · phisᵀ / quad_weight. responses must use the basis scaling
/// and have at most basis.modes columns (the first n are used).
GreensSample greens_kernel_from_responses(const EigenBasis& basis, const DenseMatrix& responses,
                                          double c = 0.0);

/// Closed-form kernel sampled at the interior nodes of a 1D grid.
GreensSample greens_exact_sample(double c, const Grid& grid);

}  // namespace opfree::pde
