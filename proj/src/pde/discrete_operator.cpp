#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "opfree/error.hpp"
#include "opfree/pde.hpp"

namespace opfree::pde {

namespace {

constexpr int kMaxRefinements = 3;

void check_peclet(double nu, double c, double h, const char* axis) {
  if (nu == 0.0 || !std::isfinite(nu)) {
    throw Error(ErrorKind::InvalidArgument, "pde", "diffusion coefficient nu must be nonzero");
  }
  const double peclet = std::abs(c) * h / (2.0 * std::abs(nu));
  if (!(peclet < 1.0)) {
    std::ostringstream msg;
    msg << "grid Peclet number " << peclet << " >= 1 along " << axis << " (|c| = " << std::abs(c)
        << ", h = " << h << ", |nu| = " << std::abs(nu) << "); refine the grid";
    throw Error(ErrorKind::PecletViolation, "pde", msg.str());
  }
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double band_inf_norm(const BandMatrix& a) {
  double best = 0.0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= a.lower() ? i - a.lower() : 0;
    const std::size_t hi = std::min(n - 1, i + a.upper());
    double row = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) row += std::abs(a.get(i, j));
    best = std::max(best, row);
  }
  return best;
}

}  // namespace

DiscreteOperator::DiscreteOperator(const Grid& grid, const Coefficients& coeffs, BandMatrix band)
    : grid_(grid),
      coeffs_(coeffs),
      band_(std::move(band)),
      lu_(band_),
      a_norm_(band_inf_norm(band_)) {}

SolveResult DiscreteOperator::solve(std::span<const double> rhs) const {
  SolveResult out{lu_.solve(rhs), 0.0};
  const double bnorm = inf_norm(rhs);
  if (bnorm == 0.0) return out;
  // Normwise backward error: the residual a rounded solution can reach
  // scales with ‖A‖‖u‖, which dwarfs ‖b‖ on fine grids.
  auto backward_error = [&](const std::vector<double>& r) {
    return inf_norm(r) / (a_norm_ * inf_norm(out.solution) + bnorm);
  };
  auto r = band_.residual(out.solution, rhs);
  out.relative_residual = backward_error(r);
  for (int step = 0; step < kMaxRefinements && out.relative_residual > 1e-16; ++step) {
    const auto correction = lu_.solve(r);
    for (std::size_t i = 0; i < correction.size(); ++i) out.solution[i] += correction[i];
    r = band_.residual(out.solution, rhs);
    out.relative_residual = backward_error(r);
  }
  if (!(out.relative_residual <= 1e-10)) {
    std::ostringstream msg;
    msg << "solve: backward error " << out.relative_residual << " exceeds 1e-10";
    throw Error(ErrorKind::SingularOperator, "pde", msg.str());
  }
  return out;
}

std::vector<double> solve(const DiscreteOperator& op, std::span<const double> rhs) {
  return op.solve(rhs).solution;
}

DiscreteOperator assemble_1d(double nu, double c, double r, const Grid& grid) {
  if (grid.dim != 1) throw Error(ErrorKind::InvalidArgument, "pde", "assemble_1d needs a 1D grid");
  check_peclet(nu, c, grid.h, "x");
  const std::size_t m = grid.points_per_axis;
  const double h2 = grid.h * grid.h;
  const double lower = nu / h2 - c / (2.0 * grid.h);
  const double upper = nu / h2 + c / (2.0 * grid.h);
  const double diag = -2.0 * nu / h2 + r;

  BandMatrix band(m, 1, 1);
  for (std::size_t i = 0; i < m; ++i) {
    band.at(i, i) = diag;
    if (i > 0) band.at(i, i - 1) = lower;
    if (i + 1 < m) band.at(i, i + 1) = upper;
  }
  return DiscreteOperator(grid, Coefficients{nu, {c, 0.0}, r}, std::move(band));
}

DiscreteOperator assemble_2d(double nu, std::array<double, 2> c, double r, const Grid& grid) {
  if (grid.dim != 2) throw Error(ErrorKind::InvalidArgument, "pde", "assemble_2d needs a 2D grid");
  check_peclet(nu, c[0], grid.h, "x");
  check_peclet(nu, c[1], grid.h, "y");
  const std::size_t m = grid.points_per_axis;
  const double h2 = grid.h * grid.h;
  const double west = nu / h2 - c[0] / (2.0 * grid.h);
  const double east = nu / h2 + c[0] / (2.0 * grid.h);
  const double south = nu / h2 - c[1] / (2.0 * grid.h);
  const double north = nu / h2 + c[1] / (2.0 * grid.h);
  const double diag = -4.0 * nu / h2 + r;

  BandMatrix band(m * m, m, m);
  for (std::size_t iy = 0; iy < m; ++iy) {
    for (std::size_t ix = 0; ix < m; ++ix) {
      const std::size_t p = iy * m + ix;
      band.at(p, p) = diag;
      if (ix > 0) band.at(p, p - 1) = west;
      if (ix + 1 < m) band.at(p, p + 1) = east;
      if (iy > 0) band.at(p, p - m) = south;
      if (iy + 1 < m) band.at(p, p + m) = north;
    }
  }
  return DiscreteOperator(grid, Coefficients{nu, c, r}, std::move(band));
}

}  // namespace opfree::pde
