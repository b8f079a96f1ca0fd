#include <string>

#include "opfree/error.hpp"
#include "opfree/sketch.hpp"

namespace opfree::sketch {

DenseMatrix toeplitz_from_two_queries(const MatVecOracle& oracle, std::size_t n) {
  if (n == 0) return {};
  std::vector<double> e(n, 0.0);
  e[0] = 1.0;
  const std::vector<double> first_col = oracle(e);
  e[0] = 0.0;
  e[n - 1] = 1.0;
  const std::vector<double> last_col = oracle(e);
  if (first_col.size() != n || last_col.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "sketch",
                "toeplitz_from_two_queries: oracle returned a vector of the wrong length");
  }

  // T(i, j) = t_{i-j}; t_d for d >= 0 sits in the first column, t_{-d} at
  // last_col[n-1-d].
  DenseMatrix t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      t(i, j) = i >= j ? first_col[i - j] : last_col[n - 1 - (j - i)];
  return t;
}

DenseMatrix toeplitz_from_symbol(std::span<const double> symbol) {
  if (symbol.size() % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "sketch",
                "toeplitz_from_symbol: symbol length must be 2n - 1");
  }
  const std::size_t n = (symbol.size() + 1) / 2;
  DenseMatrix t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t(i, j) = symbol[i + n - 1 - j];
  return t;
}

}  // namespace opfree::sketch
