#include <algorithm>
#include <exception>
#include <string>
#include <thread>

#include "opfree/adjoint_free.hpp"
#include "opfree/error.hpp"

namespace opfree::adjoint_free {

ResponseMatrix query_forward(const pde::DiscreteOperator& op, const pde::EigenBasis& basis,
                             std::size_t n_queries, unsigned threads) {
  if (n_queries == 0 || n_queries > basis.modes) {
    throw Error(ErrorKind::InvalidArgument, "adjoint-free",
                "query_forward: n_queries = " + std::to_string(n_queries) + " must lie in [1, " +
                    std::to_string(basis.modes) + "]");
  }
  const std::size_t m = basis.phis.rows();
  if (op.grid().size() != m) {
    throw Error(ErrorKind::DimensionMismatch, "adjoint-free",
                "query_forward: operator and basis live on different grids");
  }

  ResponseMatrix resp;
  resp.lambdas.assign(basis.lambdas.begin(), basis.lambdas.begin() + n_queries);
  resp.columns = DenseMatrix(m, n_queries);
  resp.residuals.assign(n_queries, 0.0);
  resp.grid = basis.grid;

  const unsigned workers = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(n_queries));
  std::vector<std::exception_ptr> failures(n_queries);
  auto work = [&](unsigned w) {
    for (std::size_t k = w; k < n_queries; k += workers) {
      try {
        const auto result = op.solve(basis.phis.column(k));
        resp.columns.set_column(k, result.solution);
        resp.residuals[k] = result.relative_residual;
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  for (std::size_t k = 0; k < n_queries; ++k) {
    if (!failures[k]) continue;
    try {
      std::rethrow_exception(failures[k]);
    } catch (const Error& e) {
      throw Error(e.kind(), e.module(),
                  "query k = " + std::to_string(k + 1) + ": " + std::string(e.what()));
    }
  }
  return resp;
}

ResponseMatrix pseudo_inverse_reference(const pde::EigenBasis& basis, std::size_t n_queries) {
  if (n_queries == 0 || n_queries > basis.modes) {
    throw Error(ErrorKind::InvalidArgument, "adjoint-free",
                "pseudo_inverse_reference: n_queries must lie in [1, modes]");
  }
  ResponseMatrix resp;
  resp.lambdas.assign(basis.lambdas.begin(), basis.lambdas.begin() + n_queries);
  for (std::size_t k = 0; k < n_queries; ++k) {
    if (resp.lambdas[k] == 0.0) {
      throw Error(ErrorKind::ZeroEigenvalue, "adjoint-free",
                  "pseudo_inverse_reference: lambda_" + std::to_string(k + 1) + " is zero");
    }
  }
  const std::size_t m = basis.phis.rows();
  resp.columns = DenseMatrix(m, n_queries);
  for (std::size_t i = 0; i < m; ++i) {
    const auto src = basis.phis.row(i);
    auto dst = resp.columns.row(i);
    for (std::size_t k = 0; k < n_queries; ++k) dst[k] = src[k] / resp.lambdas[k];
  }
  resp.residuals.assign(n_queries, 0.0);
  resp.grid = basis.grid;
  return resp;
}

ResponseMatrix make_response_matrix(DenseMatrix columns, std::vector<double> lambdas) {
  if (columns.cols() != lambdas.size()) {
    throw Error(ErrorKind::DimensionMismatch, "adjoint-free",
                "make_response_matrix: " + std::to_string(columns.cols()) + " columns but " +
                    std::to_string(lambdas.size()) + " eigenvalues");
  }
  ResponseMatrix resp;
  resp.residuals.assign(columns.cols(), 0.0);
  resp.columns = std::move(columns);
  resp.lambdas = std::move(lambdas);
  return resp;
}

}  // namespace opfree::adjoint_free
