#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opfree/dense_matrix.hpp"
#include "opfree/rng.hpp"

namespace opfree::sketch {

/// Singular values below this fraction of σ_max are treated as zero when
/// extracting singular subspaces or counting rank.
inline constexpr double kRankTol = 1e-10;

/// A low-rank recovery problem: hidden n x n matrix f of rank k, observed
/// only through f·x for an n x s test matrix x with orthonormal columns.
/// delta is the true near-symmetry of f, epsilon the prior bound used to
/// define the ambiguity set (delta <= epsilon < 1).
struct SketchInstance {
  DenseMatrix f;
  DenseMatrix x;
  std::size_t k = 0;
  double delta = 0.0;
  double epsilon = 0.0;
};

/// Checks every SketchInstance invariant; throws InvalidArgument naming the
/// first violated one.
void validate(const SketchInstance& inst);

struct BoundReport {
  std::optional<double> upper;  // absent when c(√(2ε) + √(2δ)) >= 1
  double lower = 0.0;
  double c_constant = 0.0;  // σ_max(xᵀV₀) / σ_min(xᵀV₀)²
  double fx_norm = 0.0;     // ‖f x‖₂
};

struct MembershipReport {
  bool rank_ok = false;
  double sketch_residual = 0.0;  // ‖a x − f x‖₂
  double symmetry_delta = 0.0;
  bool in_set = false;
};

struct ExtremalPair {
  DenseMatrix b_plus;
  DenseMatrix b_minus;
  double eta = 0.0;              // ‖E‖₂
  std::vector<double> z;         // unit row direction of E, orthogonal to Range(x)
  bool degenerate_gap = false;   // epsilon == delta: both members equal f
};

/// min over orthogonal Q of ‖U_fᵀV_f − Q‖₂ = 1 − σ_min(U_fᵀV_f), with U_f, V_f
/// the singular subspaces of f truncated at rank_tol·σ_max. Result in [0, 1].
/// Throws ZeroMatrix for f = 0.
double near_symmetry_delta(const DenseMatrix& f, double rank_tol = kRankTol);

/// Q₀ = Q_l Q_rᵀ from the SVD uᵀv = Q_l Σ Q_rᵀ; minimizes ‖v − u Q‖₂ over
/// orthogonal Q with ‖v − u Q₀‖₂² = 2(1 − σ_min(uᵀv)).
DenseMatrix align_rotation(const DenseMatrix& u, const DenseMatrix& v);

/// Lower bound on the diameter of the ambiguity set:
///   2 (σ_min²/σ_max) (acos(1−ε) − acos(1−δ)) / (π/2 + acos(1−ε) − acos(1−δ))
/// over the nonzero singular values of f. Requires 0 <= δ <= ε <= 1.
double diameter_lower_bound(const DenseMatrix& f, double epsilon, double delta);

/// Upper and lower diameter bounds for inst, with the constants they use.
BoundReport diameter_upper_bound(const SketchInstance& inst);

/// ‖E‖₂ of the extremal perturbation, (σ_min/σ_max) times the angle ratio.
double extremal_eta(double sigma_min, double sigma_max, double epsilon, double delta);

/// Witness pair B± = f(I ± E) with E = η v_min zᵀ, E x = 0. Both members lie in
/// the ambiguity set and are 2 σ_min(f) η apart. z is the first canonical
/// vector whose projection onto Range(x)^⊥ has norm >= 1e-8, normalized, so
/// the construction is deterministic. Throws NoComplement if s >= n; when
/// ε == δ returns (f, f) with degenerate_gap set.
ExtremalPair construct_extremal_pair(const SketchInstance& inst);

/// Evaluates the three membership conditions for a at tolerance tol:
/// numerical rank equal to k, ‖a x − f x‖₂ <= tol, near-symmetry <= ε + tol.
MembershipReport membership_check(const DenseMatrix& a, const SketchInstance& inst,
                                  double tol);

/// Default membership tolerance: 1e-8 · max(1, ‖f x‖₂).
double default_membership_tol(const SketchInstance& inst);

using MatVecOracle = std::function<std::vector<double>(std::span<const double>)>;

/// Rebuilds an n x n Toeplitz matrix from exactly two products, T e₁ (first
/// column) and T e_n (last column, i.e. the first row reversed).
DenseMatrix toeplitz_from_two_queries(const MatVecOracle& oracle, std::size_t n);

/// Toeplitz matrix with T(i, j) = symbol[i − j + n − 1]; symbol has 2n − 1 entries.
DenseMatrix toeplitz_from_symbol(std::span<const double> symbol);

struct InstanceSpec {
  std::size_t n = 8;
  std::size_t k = 2;
  std::size_t s = 4;
  double delta = 0.0;
  double epsilon = 0.0;
};

/// Canonical fixture: f = U S Vᵀ where V equals U except that one column is
/// rotated by angle acos(1 − δ) into Range(U)^⊥, so 1 − σ_min(UᵀV) = δ.
/// Singular values are drawn in [1, 3]; x is a random orthonormal n x s matrix.
SketchInstance make_near_symmetric_instance(const InstanceSpec& spec, Seed seed);

std::string to_json(const BoundReport& report);
std::string to_json(const MembershipReport& report);

}  // namespace opfree::sketch
