#include <algorithm>
#include <cmath>
#include <string>

#include "opfree/error.hpp"
#include "opfree/pde.hpp"

namespace opfree::pde {

double greens_exact_convdiff(double c, double x, double y) {
  if (std::abs(c) < 1e-8) return std::min(x, y) * (1.0 - std::max(x, y));
  // Common denominator c (1 − e^{−c}).
  const double denom = -c * std::expm1(-c);
  if (x >= y) {
    // (1 − e^{c(x−1)}) (1 − e^{−cy})
    return std::expm1(c * (x - 1.0)) * std::expm1(-c * y) / denom;
  }
  // (e^{cx} − 1) (e^{−cy} − e^{−c}) = (e^{cx} − 1) e^{−c} (e^{c(1−y)} − 1)
  return std::expm1(c * x) * std::exp(-c) * std::expm1(c * (1.0 - y)) / denom;
}

GreensSample greens_kernel_from_responses(const EigenBasis& basis, const DenseMatrix& responses,
                                          double c) {
  if (basis.grid.dim != 1) {
    throw Error(ErrorKind::InvalidArgument, "pde", "Green's kernels are sampled on 1D grids");
  }
  if (responses.rows() != basis.phis.rows() || responses.cols() > basis.modes) {
    throw Error(ErrorKind::DimensionMismatch, "pde",
                "greens_kernel_from_responses: responses are " + std::to_string(responses.rows()) +
                    "x" + std::to_string(responses.cols()) + ", basis has " +
                    std::to_string(basis.phis.rows()) + " nodes and " +
                    std::to_string(basis.modes) + " modes");
  }
  const std::size_t m = responses.rows();
  const std::size_t n = responses.cols();
  GreensSample out{basis.grid, DenseMatrix(m, m), c};
  const double inv_w = 1.0 / basis.grid.quad_weight;
  for (std::size_t i = 0; i < m; ++i) {
    const auto ui = responses.row(i);
    auto gi = out.values.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      const auto pj = basis.phis.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += ui[k] * pj[k];
      gi[j] = s * inv_w;
    }
  }
  return out;
}

GreensSample greens_exact_sample(double c, const Grid& grid) {
  if (grid.dim != 1) {
    throw Error(ErrorKind::InvalidArgument, "pde", "Green's kernels are sampled on 1D grids");
  }
  const std::size_t m = grid.points_per_axis;
  GreensSample out{grid, DenseMatrix(m, m), c};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out.values(i, j) = greens_exact_convdiff(c, grid.coord(i), grid.coord(j));
  return out;
}

}  // namespace opfree::pde
