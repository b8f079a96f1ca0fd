#include <algorithm>
#include <cmath>
#include <string>

#include "opfree/error.hpp"
#include "opfree/linalg.hpp"
#include "opfree/sketch.hpp"

namespace opfree::sketch {

double near_symmetry_delta(const DenseMatrix& f, double rank_tol) {
  const SVDTriple t = svd(f);
  if (t.s.empty() || t.s.front() == 0.0) {
    throw Error(ErrorKind::ZeroMatrix, "sketch", "near_symmetry_delta: matrix is zero");
  }
  const double cut = rank_tol * t.s.front();
  const auto r = static_cast<std::size_t>(
      std::count_if(t.s.begin(), t.s.end(), [cut](double x) { return x > cut; }));
  const DenseMatrix overlap = matmul_tn(t.u.columns(0, r), t.v.columns(0, r));
  const double smin = singular_values(overlap).back();
  return std::clamp(1.0 - smin, 0.0, 1.0);
}

DenseMatrix align_rotation(const DenseMatrix& u, const DenseMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "sketch",
                "align_rotation: u is " + std::to_string(u.rows()) + "x" +
                    std::to_string(u.cols()) + ", v is " + std::to_string(v.rows()) + "x" +
                    std::to_string(v.cols()));
  }
  const SVDTriple t = svd(matmul_tn(u, v));
  return matmul(t.u, t.v.transpose());
}

void validate(const SketchInstance& inst) {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorKind::InvalidArgument, "sketch", "invalid sketch instance: " + what);
  };
  const std::size_t n = inst.f.rows();
  if (inst.f.cols() != n || n == 0) fail("f must be a nonempty square matrix");
  if (inst.x.rows() != n || inst.x.cols() == 0) fail("x must have n rows and s >= 1 columns");
  if (inst.k == 0 || inst.k > n) fail("k must satisfy 1 <= k <= n");
  if (!(inst.delta >= 0.0 && inst.delta <= inst.epsilon && inst.epsilon < 1.0))
    fail("need 0 <= delta <= epsilon < 1");
  if (numerical_rank(inst.f, kRankTol) != inst.k) fail("numerical rank of f differs from k");
  if (numerical_rank(matmul(inst.f, inst.x), kRankTol) != inst.k)
    fail("rank(f x) differs from k; x does not reveal Range(f)");
  DenseMatrix gram_dev = matmul_tn(inst.x, inst.x) - DenseMatrix::identity(inst.x.cols());
  if (spectral_norm_exact(gram_dev) > 1e-12) fail("x does not have orthonormal columns");
  if (near_symmetry_delta(inst.f) > inst.delta + 1e-10)
    fail("near-symmetry of f exceeds delta");
}

}  // namespace opfree::sketch
