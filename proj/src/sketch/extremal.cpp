#include <cmath>
#include <string>

#include "opfree/error.hpp"
#include "opfree/linalg.hpp"
#include "opfree/sketch.hpp"

namespace opfree::sketch {

namespace {

// First canonical vector with a usable component in Range(x)^⊥, projected and
// normalized.
std::vector<double> complement_direction(const DenseMatrix& x) {
  const std::size_t n = x.rows();
  for (std::size_t e = 0; e < n; ++e) {
    std::vector<double> z(n, 0.0);
    z[e] = 1.0;
    const auto coeffs = x.row(e);  // xᵀ e_e
    for (std::size_t i = 0; i < n; ++i) z[i] -= dot(x.row(i), coeffs);
    const double nz = norm2(z);
    if (nz >= 1e-8) {
      for (double& v : z) v /= nz;
      return z;
    }
  }
  throw Error(ErrorKind::NoComplement, "sketch", "Range(x) has no orthogonal complement");
}

}  // namespace

ExtremalPair construct_extremal_pair(const SketchInstance& inst) {
  const std::size_t n = inst.f.rows();
  if (inst.x.cols() >= n) {
    throw Error(ErrorKind::NoComplement, "sketch",
                "construct_extremal_pair: s = " + std::to_string(inst.x.cols()) +
                    " test vectors leave no complement in dimension " + std::to_string(n));
  }
  validate(inst);

  ExtremalPair pair;
  pair.z = complement_direction(inst.x);
  if (inst.epsilon == inst.delta) {
    pair.b_plus = inst.f;
    pair.b_minus = inst.f;
    pair.degenerate_gap = true;
    return pair;
  }

  const SVDTriple t = svd(inst.f);
  const double smax = t.s.front();
  const double smin = t.s[inst.k - 1];
  pair.eta = extremal_eta(smin, smax, inst.epsilon, inst.delta);

  // f E = η (f v_min) zᵀ, a rank-one update.
  const auto fv = matvec(inst.f, t.v.column(inst.k - 1));
  DenseMatrix update(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) update(i, j) = pair.eta * fv[i] * pair.z[j];

  pair.b_plus = inst.f + update;
  pair.b_minus = inst.f - update;
  return pair;
}

double default_membership_tol(const SketchInstance& inst) {
  return 1e-8 * std::max(1.0, spectral_norm_exact(matmul(inst.f, inst.x)));
}

MembershipReport membership_check(const DenseMatrix& a, const SketchInstance& inst, double tol) {
  if (a.rows() != inst.f.rows() || a.cols() != inst.f.cols() || inst.x.rows() != a.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "sketch",
                "membership_check: candidate is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + ", instance is " +
                    std::to_string(inst.f.rows()) + "x" + std::to_string(inst.f.cols()));
  }
  MembershipReport report;
  report.rank_ok = numerical_rank(a, kRankTol) == inst.k;
  report.sketch_residual = spectral_norm_exact(matmul(a, inst.x) - matmul(inst.f, inst.x));
  // A zero candidate has no singular subspaces; report the maximal distance.
  report.symmetry_delta = max_abs(a) == 0.0 ? 1.0 : near_symmetry_delta(a);
  report.in_set = report.rank_ok && report.sketch_residual <= tol &&
                  report.symmetry_delta <= inst.epsilon + tol;
  return report;
}

}  // namespace opfree::sketch
