#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "opfree/error.hpp"
#include "opfree/pde.hpp"

namespace opfree::pde {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

// sin(freq · π · x_node) with the argument reduced exactly in integers:
// x_node = (node + 1) / (M + 1), period 2(M + 1).
double grid_sine(std::size_t freq, std::size_t node, std::size_t points) {
  const std::size_t period = 2 * (points + 1);
  const std::size_t m = (freq * (node + 1)) % period;
  return std::sin(std::numbers::pi * static_cast<double>(m) / static_cast<double>(points + 1));
}

}  // namespace

std::size_t Grid::size() const noexcept {
  return dim == 1 ? points_per_axis : points_per_axis * points_per_axis;
}

Grid make_grid(int dim, std::size_t points_per_axis) {
  if (dim != 1 && dim != 2) {
    throw Error(ErrorKind::InvalidArgument, "pde", "grid dimension must be 1 or 2");
  }
  if (points_per_axis < 2) {
    throw Error(ErrorKind::InvalidArgument, "pde", "grid needs at least 2 interior points");
  }
  Grid g;
  g.dim = dim;
  g.points_per_axis = points_per_axis;
  g.h = 1.0 / static_cast<double>(points_per_axis + 1);
  g.quad_weight = dim == 1 ? g.h : g.h * g.h;
  return g;
}

double inner_product(const Grid& grid, std::span<const double> f, std::span<const double> g) {
  if (f.size() != grid.size() || g.size() != grid.size()) {
    throw Error(ErrorKind::DimensionMismatch, "pde", "inner_product: length differs from grid");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return grid.quad_weight * s;
}

EigenBasis sine_basis_1d(std::size_t n_modes, const Grid& grid) {
  if (grid.dim != 1) throw Error(ErrorKind::InvalidArgument, "pde", "sine_basis_1d needs a 1D grid");
  if (n_modes == 0) throw Error(ErrorKind::InvalidArgument, "pde", "sine_basis_1d: no modes");
  const std::size_t m = grid.points_per_axis;
  if (2 * n_modes >= m) {
    throw Error(ErrorKind::Underresolved, "pde",
                "sine_basis_1d: " + std::to_string(n_modes) + " modes need more than " +
                    std::to_string(2 * n_modes) + " grid points, got " + std::to_string(m));
  }
  EigenBasis b;
  b.grid = grid;
  b.modes = n_modes;
  b.lambdas.resize(n_modes);
  b.frequencies.resize(n_modes);
  b.phis = DenseMatrix(m, n_modes);
  const double scale = std::sqrt(2.0) * std::sqrt(grid.h);
  for (std::size_t k = 0; k < n_modes; ++k) {
    const double freq = static_cast<double>(k + 1);
    b.lambdas[k] = kPi2 * (freq * freq);
    b.frequencies[k] = {static_cast<int>(k + 1), 0};
  }
  for (std::size_t i = 0; i < m; ++i) {
    auto row = b.phis.row(i);
    for (std::size_t k = 0; k < n_modes; ++k) row[k] = scale * grid_sine(k + 1, i, m);
  }
  return b;
}

EigenBasis sine_basis_2d(std::size_t n_modes, const Grid& grid) {
  if (grid.dim != 2) throw Error(ErrorKind::InvalidArgument, "pde", "sine_basis_2d needs a 2D grid");
  if (n_modes == 0) throw Error(ErrorKind::InvalidArgument, "pde", "sine_basis_2d: no modes");
  const std::size_t m = grid.points_per_axis;
  const std::size_t kmax = (m - 1) / 2;  // largest frequency with 2 kmax < m

  struct Mode {
    std::size_t q, i, j;
  };
  std::vector<Mode> all;
  all.reserve(kmax * kmax);
  for (std::size_t i = 1; i <= kmax; ++i)
    for (std::size_t j = 1; j <= kmax; ++j) all.push_back({i * i + j * j, i, j});
  std::sort(all.begin(), all.end(), [](const Mode& a, const Mode& b) {
    if (a.q != b.q) return a.q < b.q;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  // Any mode outside the frequency box has q >= (kmax + 1)² + 1.
  if (n_modes > all.size() || all[n_modes - 1].q > (kmax + 1) * (kmax + 1)) {
    throw Error(ErrorKind::Underresolved, "pde",
                "sine_basis_2d: " + std::to_string(n_modes) +
                    " modes exceed the resolvable frequency box of a " + std::to_string(m) +
                    "-point grid");
  }

  EigenBasis b;
  b.grid = grid;
  b.modes = n_modes;
  b.lambdas.resize(n_modes);
  b.frequencies.resize(n_modes);
  for (std::size_t k = 0; k < n_modes; ++k) {
    b.lambdas[k] = kPi2 * static_cast<double>(all[k].q);
    b.frequencies[k] = {static_cast<int>(all[k].i), static_cast<int>(all[k].j)};
  }

  std::size_t top = 0;
  for (std::size_t k = 0; k < n_modes; ++k) top = std::max({top, all[k].i, all[k].j});
  DenseMatrix table(top + 1, m);
  for (std::size_t f = 1; f <= top; ++f)
    for (std::size_t node = 0; node < m; ++node) table(f, node) = grid_sine(f, node, m);

  b.phis = DenseMatrix(m * m, n_modes);
  const double scale = 2.0 * grid.h;
  for (std::size_t iy = 0; iy < m; ++iy) {
    for (std::size_t ix = 0; ix < m; ++ix) {
      auto row = b.phis.row(iy * m + ix);
      for (std::size_t k = 0; k < n_modes; ++k)
        row[k] = scale * table(all[k].i, ix) * table(all[k].j, iy);
    }
  }
  return b;
}

}  // namespace opfree::pde
