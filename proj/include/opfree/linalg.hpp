#pragma once

#include <cstddef>
#include <vector>

#include "opfree/dense_matrix.hpp"
#include "opfree/rng.hpp"

namespace opfree {

struct QrFactors {
  DenseMatrix q;  // rows x cols, orthonormal columns
  DenseMatrix r;  // cols x cols, upper triangular, nonnegative diagonal
};

/// Thin Householder QR. Throws RankDeficient when a diagonal entry of r falls
/// below 1e-12 times the Frobenius norm of m.
QrFactors qr_factor(const DenseMatrix& m);

/// Slim singular value decomposition m = U diag(S) Vᵀ.
struct SVDTriple {
  DenseMatrix u;          // m x r
  std::vector<double> s;  // nonincreasing, >= 0
  DenseMatrix v;          // n x r
};

inline constexpr std::size_t kMaxDenseSvdDim = 512;

/// One-sided Jacobi SVD on the narrower orientation of m, r = min(rows, cols).
/// Each singular pair is signed so that the largest-magnitude entry of the U
/// column is positive. Zero singular values get orthonormal completions in U
/// and V. Throws ConvergenceFailure if the sweep budget is exhausted.
SVDTriple svd(const DenseMatrix& m);

/// Singular values only (same algorithm as svd()).
std::vector<double> singular_values(const DenseMatrix& m);

/// Spectral norm computed through a full svd(); reference path for small inputs.
double spectral_norm_exact(const DenseMatrix& m);

struct PowerOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  std::size_t block = 4;
};

/// Result of a blocked power iteration on a Gram matrix.
struct NormEstimate {
  double value = 0.0;
  /// Top Ritz vector, usable as a warm start for a grown or shrunk problem.
  std::vector<double> ritz_vector;
  std::size_t iterations = 0;
};

/// Estimate of σ_max(m) by blocked power iteration with Rayleigh–Ritz on mᵀm
/// (or m mᵀ, whichever is smaller), started from a seeded Gaussian block.
/// Stops once the relative change of the estimate is <= tol; throws
/// ConvergenceFailure after max_iter iterations.
double spectral_norm(const DenseMatrix& m, double tol, std::size_t max_iter, Seed seed);

/// Same iteration as spectral_norm(), applied to a precomputed symmetric
/// positive semidefinite Gram matrix g = mᵀm; returns sqrt(λ_max(g)).
///
/// When `warm_start` is non-empty it must have g.rows() entries and becomes
/// the first block column. The returned estimate is then never below the
/// Rayleigh quotient of the warm start, which makes sequences of nested
/// problems monotone.
NormEstimate gram_spectral_norm(const DenseMatrix& g, const PowerOptions& opts, Seed seed,
                                const std::vector<double>& warm_start = {});

/// Principal angles θ₁ <= ... <= θ_k between Range(u) and Range(v), both with
/// orthonormal columns. Cosines come from svd(uᵀv); angles below π/4 are
/// taken from the sines (svd of v − u uᵀv) for accuracy. The result is
/// exactly symmetric in (u, v).
std::vector<double> principal_angles(const DenseMatrix& u, const DenseMatrix& v);

/// Number of singular values strictly greater than tol * σ_max(m).
std::size_t numerical_rank(const DenseMatrix& m, double tol);

/// Orthonormal basis for Range(m) of a full-column-rank matrix (qr_factor().q).
DenseMatrix orthonormalize(const DenseMatrix& m);

/// Random n x k matrix with orthonormal columns.
DenseMatrix random_orthonormal(std::size_t n, std::size_t k, Rng& rng);

}  // namespace opfree
