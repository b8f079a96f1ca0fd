#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "opfree/error.hpp"
#include "opfree/linalg.hpp"
#include "opfree/sketch.hpp"

namespace opfree::sketch {

SketchInstance make_near_symmetric_instance(const InstanceSpec& spec, Seed seed) {
  if (spec.k == 0 || spec.k + 1 > spec.n || spec.s < spec.k || spec.s > spec.n) {
    throw Error(ErrorKind::InvalidArgument, "sketch",
                "instance generator needs 1 <= k < n and k <= s <= n");
  }
  if (!(spec.delta >= 0.0 && spec.delta <= spec.epsilon && spec.epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidRange, "sketch", "need 0 <= delta <= epsilon < 1");
  }
  Rng rng(seed);
  const DenseMatrix w = random_orthonormal(spec.n, spec.k + 1, rng);
  const DenseMatrix u = w.columns(0, spec.k);
  DenseMatrix v = u;
  const std::size_t j = rng.uniform_int(0, spec.k - 1);
  const double theta = std::acos(1.0 - spec.delta);
  for (std::size_t i = 0; i < spec.n; ++i)
    v(i, j) = std::cos(theta) * u(i, j) + std::sin(theta) * w(i, spec.k);

  std::vector<double> sigma(spec.k);
  for (double& s : sigma) s = rng.uniform(1.0, 3.0);
  std::sort(sigma.begin(), sigma.end(), std::greater<>());

  DenseMatrix us = u;
  for (std::size_t i = 0; i < spec.n; ++i)
    for (std::size_t c = 0; c < spec.k; ++c) us(i, c) *= sigma[c];

  SketchInstance inst;
  inst.f = matmul(us, v.transpose());
  inst.k = spec.k;
  inst.delta = spec.delta;
  inst.epsilon = spec.epsilon;
  for (int attempt = 0; attempt < 16; ++attempt) {
    inst.x = random_orthonormal(spec.n, spec.s, rng);
    if (numerical_rank(matmul(inst.f, inst.x), kRankTol) == spec.k) return inst;
  }
  throw Error(ErrorKind::RankDeficient, "sketch",
              "instance generator could not draw a test matrix revealing Range(f)");
}

}  // namespace opfree::sketch
