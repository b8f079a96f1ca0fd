#include <algorithm>
#include <cmath>

#include "opfree/dense_matrix.hpp"
#include "opfree/linalg.hpp"
#include "opfree/selfcheck.hpp"
#include "opfree/sketch.hpp"

namespace opfree::selfcheck {

SuiteResult rotation_distance_identity(std::size_t trials, Seed seed) {
  SuiteResult res{"rotation", trials, 0, 0.0};
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(seed.split(t));
    const std::size_t n = rng.uniform_int(1, 20);
    const std::size_t k = rng.uniform_int(1, n);
    const DenseMatrix u = random_orthonormal(n, k, rng);
    const DenseMatrix v = random_orthonormal(n, k, rng);
    const DenseMatrix q0 = sketch::align_rotation(u, v);
    const double lhs = std::pow(spectral_norm_exact(v - matmul(u, q0)), 2);
    const double rhs = 2.0 * (1.0 - singular_values(matmul_tn(u, v)).back());
    const double gap = std::abs(lhs - rhs);
    res.worst = std::max(res.worst, gap);
    if (!(gap <= 1e-10)) ++res.failures;
  }
  return res;
}

SuiteResult truncated_bound(std::size_t trials, Seed seed) {
  SuiteResult res{"truncated", trials, 0, 0.0};
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(seed.split(t));
    const std::size_t rows = rng.uniform_int(2, 40);
    const std::size_t cols = rng.uniform_int(2, 30);
    const DenseMatrix y = gaussian_matrix(rows, cols, rng);
    std::vector<double> lambda(cols);
    double acc = 0.0;
    for (double& l : lambda) l = (acc += rng.uniform(0.05, 3.0));

    DenseMatrix scaled = y;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) scaled(i, j) *= lambda[j];
    const double rhs = spectral_norm_exact(scaled);
    bool ok = true;
    for (std::size_t n = 1; n < cols; ++n) {
      const double lhs = spectral_norm_exact(y.columns(n, cols - n)) * lambda[n];
      res.worst = std::max(res.worst, lhs / rhs);
      if (!(lhs <= rhs * (1.0 + 1e-12))) ok = false;
    }
    if (!ok) ++res.failures;
  }
  return res;
}

SuiteResult witness_sandwich(std::size_t trials, Seed seed) {
  SuiteResult res{"sandwich", 0, 0, 0.0};
  // Draws whose upper-bound precondition fails are skipped; the cap keeps a
  // pathological seed from looping forever and shows up as missing trials.
  for (std::size_t draw = 0; res.trials < trials && draw < 50 * trials; ++draw) {
    Rng rng(seed.split(draw));
    sketch::InstanceSpec spec;
    spec.n = rng.uniform_int(4, 12);
    spec.k = rng.uniform_int(1, std::min<std::size_t>(3, spec.n - 2));
    spec.s = rng.uniform_int(spec.k, spec.n - 1);
    spec.delta = std::pow(10.0, rng.uniform(-6.0, -3.0));
    spec.epsilon = spec.delta * rng.uniform(1.5, 20.0);
    const auto inst = sketch::make_near_symmetric_instance(spec, seed.split(draw + 0x5eed));
    const auto bounds = sketch::diameter_upper_bound(inst);
    if (!bounds.upper) continue;
    ++res.trials;

    const auto pair = sketch::construct_extremal_pair(inst);
    const double tol = sketch::default_membership_tol(inst);
    const bool members = sketch::membership_check(pair.b_plus, inst, tol).in_set &&
                         sketch::membership_check(pair.b_minus, inst, tol).in_set;
    const double gap = spectral_norm_exact(pair.b_plus - pair.b_minus);
    const double violation = std::max({0.0, bounds.lower - gap, gap - *bounds.upper});
    res.worst = std::max(res.worst, violation);
    if (!members || violation > 1e-9) ++res.failures;
  }
  if (res.trials < trials) res.failures += trials - res.trials;
  return res;
}

}  // namespace opfree::selfcheck
