#include <algorithm>
#include <cmath>
#include <numbers>

#include "opfree/error.hpp"
#include "opfree/linalg.hpp"
#include "opfree/sketch.hpp"

namespace opfree::sketch {

namespace {

struct Extremes {
  double smin;
  double smax;
};

Extremes nonzero_extremes(const DenseMatrix& f) {
  const auto s = singular_values(f);
  if (s.empty() || s.front() == 0.0) {
    throw Error(ErrorKind::ZeroMatrix, "sketch", "singular values requested for a zero matrix");
  }
  const double cut = kRankTol * s.front();
  double smin = s.front();
  for (double x : s)
    if (x > cut) smin = x;
  return {smin, s.front()};
}

double angle_ratio(double epsilon, double delta) {
  if (!(delta >= 0.0 && delta <= epsilon && epsilon <= 1.0)) {
    throw Error(ErrorKind::InvalidRange, "sketch", "need 0 <= delta <= epsilon <= 1");
  }
  const double gap = std::acos(1.0 - epsilon) - std::acos(1.0 - delta);
  return gap / (0.5 * std::numbers::pi + gap);
}

}  // namespace

double extremal_eta(double sigma_min, double sigma_max, double epsilon, double delta) {
  return (sigma_min / sigma_max) * angle_ratio(epsilon, delta);
}

double diameter_lower_bound(const DenseMatrix& f, double epsilon, double delta) {
  const double ratio = angle_ratio(epsilon, delta);
  const auto [smin, smax] = nonzero_extremes(f);
  return 2.0 * (smin * smin / smax) * ratio;
}

BoundReport diameter_upper_bound(const SketchInstance& inst) {
  validate(inst);
  const SVDTriple t = svd(inst.f);
  const DenseMatrix v0 = t.v.columns(0, inst.k);
  const auto proj = singular_values(matmul_tn(inst.x, v0));
  const double smin = proj.back();

  BoundReport report;
  report.c_constant = proj.front() / (smin * smin);
  report.fx_norm = spectral_norm_exact(matmul(inst.f, inst.x));
  report.lower = diameter_lower_bound(inst.f, inst.epsilon, inst.delta);

  const double radius = std::sqrt(2.0 * inst.epsilon) + std::sqrt(2.0 * inst.delta);
  const double t_c = report.c_constant * radius;
  if (t_c < 1.0) {
    report.upper =
        4.0 * report.fx_norm * (report.c_constant * report.c_constant * radius) / (1.0 - t_c);
  }
  return report;
}

}  // namespace opfree::sketch
