#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "opfree/adjoint_free.hpp"
#include "opfree/error.hpp"
#include "opfree/linalg.hpp"
#include "oracles.hpp"

using namespace opfree;
using namespace opfree::adjoint_free;

namespace {

constexpr double kPi = std::numbers::pi;

ResponseMatrix random_response(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(Seed{seed});
  DenseMatrix y = gaussian_matrix(rows, cols, rng);
  std::vector<double> lambdas(cols);
  double acc = 0.0;
  for (double& l : lambdas) l = (acc += rng.uniform(0.1, 2.0));
  return make_response_matrix(std::move(y), std::move(lambdas));
}

std::vector<std::size_t> all_n(std::size_t big_n) {
  std::vector<std::size_t> v;
  for (std::size_t n = 1; n < big_n; ++n) v.push_back(n);
  return v;
}

void expect_error(ErrorKind kind, const std::function<void()>& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

// ---- query_forward ----

TEST(QueryForward, SingleQueryEqualsDirectSolve) {
  const auto g = pde::make_grid(1, 300);
  const auto op = pde::assemble_1d(0.25, 5.0, 1.0, g);
  const auto basis = pde::sine_basis_1d(10, g);
  const auto resp = query_forward(op, basis, 1);
  ASSERT_EQ(resp.n_queries(), 1u);
  EXPECT_EQ(resp.columns.column(0), pde::solve(op, basis.phis.column(0)));
  EXPECT_LE(resp.residuals[0], 1e-10);
}

TEST(QueryForward, NegativeLaplacianActsDiagonally) {
  // Sampled sines are exact discrete eigenvectors of the 3-point stencil.
  const auto g = pde::make_grid(1, 400);
  const auto op = pde::assemble_1d(-1.0, 0.0, 0.0, g);
  const auto basis = pde::sine_basis_1d(40, g);
  const auto resp = query_forward(op, basis, 40);
  for (std::size_t k = 0; k < 40; ++k) {
    const double disc = (2.0 - 2.0 * std::cos((k + 1) * kPi * g.h)) / (g.h * g.h);
    for (std::size_t i = 0; i < 400; ++i)
      ASSERT_NEAR(resp.columns(i, k), basis.phis(i, k) / disc, 1e-12 / disc);
    // And within the dispersion tolerance of the continuum eigenvalue.
    EXPECT_NEAR(disc / basis.lambdas[k], 1.0, std::pow(kPi * (k + 1) * g.h, 2) / 12 * 1.01);
  }
}

TEST(QueryForward, ColumnNormsDecayLikeInverseEigenvalues) {
  const auto g = pde::make_grid(1, 4000);
  const auto op = pde::assemble_1d(0.25, 5.0, 1.0, g);
  const auto basis = pde::sine_basis_1d(601, g);
  const auto resp = query_forward(op, basis, 601);
  for (std::size_t k = 50; k <= 300; k += 10) {
    const double ratio = norm2(resp.columns.column(2 * k - 1)) / norm2(resp.columns.column(k - 1));
    EXPECT_GE(ratio, 0.15) << "k=" << k;
    EXPECT_LE(ratio, 0.45) << "k=" << k;
  }
  for (double r : resp.residuals) EXPECT_LE(r, 1e-10);
}

TEST(QueryForward, SchedulingIndependentBitwise) {
  const auto g = pde::make_grid(2, 24);
  const auto op = pde::assemble_2d(1.0, {10.0, 5.0}, 0.0, g);
  const auto basis = pde::sine_basis_2d(50, g);
  const auto seq = query_forward(op, basis, 50, 1);
  for (unsigned threads : {2u, 3u, 8u}) {
    const auto par = query_forward(op, basis, 50, threads);
    EXPECT_EQ(par.columns, seq.columns);
    EXPECT_EQ(par.residuals, seq.residuals);
  }
}

TEST(QueryForward, RejectsTooManyQueries) {
  const auto g = pde::make_grid(1, 100);
  const auto basis = pde::sine_basis_1d(10, g);
  const auto op = pde::assemble_1d(-1.0, 0.0, 0.0, g);
  expect_error(ErrorKind::InvalidArgument, [&] { query_forward(op, basis, 11); });
  const auto other = pde::assemble_1d(-1.0, 0.0, 0.0, pde::make_grid(1, 90));
  expect_error(ErrorKind::DimensionMismatch, [&] { query_forward(other, basis, 5); });
}

// ---- pseudo-inverse reference ----

TEST(PseudoInverse, FirstColumnIsScaledEigenfunction) {
  const auto basis = pde::sine_basis_1d(20, pde::make_grid(1, 200));
  const auto resp = pseudo_inverse_reference(basis, 20);
  for (std::size_t i = 0; i < 200; ++i)
    EXPECT_DOUBLE_EQ(resp.columns(i, 0), basis.phis(i, 0) / (kPi * kPi));
}

TEST(PseudoInverse, ZeroEigenvalueRejected) {
  auto basis = pde::sine_basis_1d(5, pde::make_grid(1, 50));
  basis.lambdas[2] = 0.0;
  expect_error(ErrorKind::ZeroEigenvalue, [&] { pseudo_inverse_reference(basis, 5); });
}

TEST(PseudoInverse, EqualityCaseOfTheProjectionBound) {
  const auto basis = pde::sine_basis_1d(120, pde::make_grid(1, 1000));
  const auto resp = pseudo_inverse_reference(basis, 120);
  const auto table = convergence_study(resp, all_n(120));
  for (const auto& row : table.rows) {
    EXPECT_NEAR(row.err * row.lambda_next, 1.0, 1e-8) << "n=" << row.n;
    EXPECT_NEAR(row.m_norm, 1.0, 1e-10);
  }
  EXPECT_NEAR(table.m_norm_final, 1.0, 1e-10);
  const auto cert = bound_certificate(table);
  EXPECT_TRUE(cert.passed);
  EXPECT_NEAR(cert.worst_ratio, 1.0, 1e-8);
}

// ---- error_curve / lastar_curve ----

TEST(ErrorCurve, LastRowIsNormOfLastColumn) {
  const auto resp = random_response(40, 12, 1);
  const auto table = error_curve(resp, {11});
  EXPECT_NEAR(table.rows[0].err, norm2(resp.columns.column(11)), 1e-12);
  EXPECT_EQ(table.rows[0].lambda_next, resp.lambdas[11]);
}

TEST(ErrorCurve, MatchesFullSvdOfEveryTail) {
  const auto resp = random_response(60, 30, 9);
  const auto table = error_curve(resp, all_n(30));
  for (const auto& row : table.rows) {
    const double ref = oracle::spectral_norm(resp.columns.columns(row.n, 30 - row.n));
    EXPECT_NEAR(row.err, ref, 1e-8 * ref) << "n=" << row.n;
  }
}

TEST(ErrorCurve, EmptyTailAndBadListsRejected) {
  const auto resp = random_response(10, 5, 2);
  expect_error(ErrorKind::EmptyTail, [&] { error_curve(resp, {5}); });
  expect_error(ErrorKind::InvalidArgument, [&] { error_curve(resp, {3, 2}); });
  expect_error(ErrorKind::InvalidArgument, [&] { error_curve(resp, {0, 2}); });
}

TEST(LastarCurve, MonotoneOnRandomResponse) {
  const auto resp = random_response(50, 20, 10);
  std::vector<std::size_t> n_list;
  for (std::size_t n = 1; n <= 20; ++n) n_list.push_back(n);
  const auto curve = lastar_curve(resp, n_list);
  for (std::size_t i = 1; i < curve.m_norm.size(); ++i)
    EXPECT_GE(curve.m_norm[i], curve.m_norm[i - 1] - 1e-12);
  DenseMatrix scaled = resp.columns;
  for (std::size_t i = 0; i < scaled.rows(); ++i)
    for (std::size_t j = 0; j < scaled.cols(); ++j) scaled(i, j) *= resp.lambdas[j];
  EXPECT_NEAR(curve.m_norm_final, oracle::spectral_norm(scaled), 1e-8 * curve.m_norm_final);
  EXPECT_EQ(curve.m_norm.back(), curve.m_norm_final);
}

TEST(ConvergenceStudy, MonotoneAndCertifiedOnRandomResponses) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto resp = random_response(30, 25, 200 + s);
    const auto table = convergence_study(resp, all_n(25));
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
      EXPECT_LE(table.rows[i].err, table.rows[i - 1].err + 1e-12);
      EXPECT_GE(table.rows[i].m_norm, table.rows[i - 1].m_norm - 1e-12);
    }
    EXPECT_TRUE(bound_certificate(table).passed);
  }
}

// ---- bound_certificate ----

TEST(Certificate, ZeroOperatorPasses) {
  const auto resp = make_response_matrix(DenseMatrix(20, 6), {1, 2, 3, 4, 5, 6});
  const auto table = convergence_study(resp, all_n(6));
  for (const auto& row : table.rows) {
    EXPECT_EQ(row.err, 0.0);
    EXPECT_EQ(row.bound, 0.0);
  }
  const auto cert = bound_certificate(table);
  EXPECT_TRUE(cert.passed);
  EXPECT_EQ(cert.worst_ratio, 0.0);
}

TEST(Certificate, DetectsViolation) {
  ConvergenceTable t;
  t.m_norm_final = 1.0;
  t.rows = {{1, 2.0, 0.4, 1.0, 0.5}, {2, 4.0, 0.3, 1.0, 0.25}};
  const auto cert = bound_certificate(t);
  EXPECT_FALSE(cert.passed);
  EXPECT_EQ(cert.worst_n, 2u);
  EXPECT_DOUBLE_EQ(cert.worst_ratio, 1.2);
}

TEST(Certificate, TruncatedBoundBruteForce) {
  Rng rng(Seed{11});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = rng.uniform_int(2, 30), cols = rng.uniform_int(2, 20);
    const DenseMatrix y = gaussian_matrix(rows, cols, rng);
    std::vector<double> lambda(cols);
    double acc = 0.0;
    for (double& l : lambda) l = (acc += rng.uniform(0.05, 3.0));
    DenseMatrix scaled = y;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) scaled(i, j) *= lambda[j];
    const double rhs = oracle::spectral_norm(scaled);
    for (std::size_t n = 1; n < cols; ++n)
      ASSERT_LE(oracle::spectral_norm(y.columns(n, cols - n)), rhs / lambda[n] * (1 + 1e-12));
  }
}

// ---- rate fits ----

TEST(RateFit, ExactPowerLaw) {
  ConvergenceTable t;
  for (std::size_t n : {2u, 4u, 8u, 16u, 32u, 64u}) t.rows.push_back({n, 0, 1.0 / double(n * n), 0, 0});
  const auto fit = rate_fit(t, 1, 100);
  EXPECT_NEAR(fit.slope, -2.0, 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
  EXPECT_EQ(fit.points, 6u);
}

TEST(RateFit, PseudoInverseRates) {
  const auto b1 = pde::sine_basis_1d(601, pde::make_grid(1, 4000));
  const auto t1 = error_curve(pseudo_inverse_reference(b1, 601), default_n_list(601));
  EXPECT_NEAR(rate_fit(t1, 32, 512).slope, -2.0, 0.05);
  const auto b2 = pde::sine_basis_2d(601, pde::make_grid(2, 96));
  const auto t2 = error_curve(pseudo_inverse_reference(b2, 601), default_n_list(601));
  // Tail norms are 1/λ_{n+1}; the 2D spectrum carries a boundary correction to
  // Weyl's law, so compare against a fit of the eigenvalues themselves.
  std::vector<double> xs, ys;
  for (std::size_t n : {32u, 64u, 128u, 256u, 512u}) {
    xs.push_back(std::log(double(n)));
    ys.push_back(-std::log(b2.lambdas[n]));
  }
  const double direct = linear_fit(xs, ys).slope;
  EXPECT_NEAR(rate_fit(t2, 32, 512).slope, direct, 1e-8);
  EXPECT_GT(direct, -1.0);
  EXPECT_LT(direct, -0.85);
}

TEST(RateFit, InsufficientData) {
  ConvergenceTable t;
  for (std::size_t n : {2u, 4u, 8u, 16u}) t.rows.push_back({n, 0, 1.0 / n, 0, 0});
  t.rows.push_back({32, 0, 0.0, 0, 0});  // vanishing errors do not count
  expect_error(ErrorKind::InsufficientData, [&] { rate_fit(t, 1, 100); });
}

TEST(LinearFit, KnownLine) {
  const auto fit = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_DOUBLE_EQ(fit.slope, 2.0);
  EXPECT_DOUBLE_EQ(fit.intercept, 1.0);
  EXPECT_DOUBLE_EQ(fit.r2, 1.0);
}

TEST(Spearman, RanksWithTies) {
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  // Average ranks: y ranks (1.5, 1.5, 3, 4) against (1, 2, 3, 4).
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {5, 5, 6, 7}), 0.9486832980505138, 1e-15);
}

TEST(DefaultNList, GeometricPlusLast) {
  EXPECT_EQ(default_n_list(601),
            (std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 600}));
  EXPECT_EQ(default_n_list(300).size(), 10u);
  EXPECT_EQ(default_n_list(513).back(), 512u);
  EXPECT_EQ(default_n_list(513).size(), 10u);
}

// ---- perturbation sweep ----

TEST(PerturbationSweep, ErrorGrowsWithAdvection) {
  const auto g = pde::make_grid(1, 1000);
  const auto table = perturbation_sweep({0.0, 5.0, 10.0}, 100, 401, g);
  ASSERT_EQ(table.rows.size(), 3u);
  EXPECT_LT(table.rows[0].err_at_n, table.rows[1].err_at_n);
  EXPECT_LT(table.rows[1].err_at_n, table.rows[2].err_at_n);

  // The c = 0 row reproduced by an independent single run.
  const auto single = perturbation_sweep({0.0}, 100, 401, g);
  EXPECT_NEAR(single.rows[0].m_norm_final, table.rows[0].m_norm_final, 1e-12);
  EXPECT_EQ(single.rows[0].err_at_n, table.rows[0].err_at_n);
}

TEST(PerturbationSweep, PecletNamesSmallestOffender) {
  const auto g = pde::make_grid(1, 99);  // h = 0.01, limit |c| < 200
  try {
    perturbation_sweep({0.0, 150.0, 250.0, 300.0}, 5, 20, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PecletViolation);
    EXPECT_NE(std::string(e.what()).find("c = 250"), std::string::npos) << e.what();
  }
}

TEST(PerturbationSweep, RejectsUnorderedValues) {
  const auto g = pde::make_grid(1, 99);
  expect_error(ErrorKind::InvalidArgument, [&] { perturbation_sweep({1.0, 1.0}, 5, 20, g); });
  expect_error(ErrorKind::InvalidArgument, [&] { perturbation_sweep({-1.0, 1.0}, 5, 20, g); });
  expect_error(ErrorKind::EmptyTail, [&] { perturbation_sweep({1.0}, 20, 20, g); });
}

// ---- Green's error study ----

TEST(GreensErrorStudy, LaplacianAtTwoHundredModes) {
  const auto rows = greens_error_study(0.0, {50, 100, 200}, pde::make_grid(1, 1000));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LT(rows.back().rel_l2_error, 1e-2);
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_LE(rows[i].rel_l2_error, rows[i - 1].rel_l2_error + 1e-12);
}

TEST(GreensErrorStudy, MatchesDirectKernelReconstruction) {
  const auto g = pde::make_grid(1, 200);
  const auto rows = greens_error_study(3.0, {10, 40}, g);
  const auto basis = pde::sine_basis_1d(40, g);
  const auto resp = query_forward(pde::assemble_1d(-1.0, 3.0, 0.0, g), basis, 40);
  const auto ker = pde::greens_kernel_from_responses(basis, resp.columns);
  const auto exact = pde::greens_exact_sample(3.0, g);
  const double ref = frobenius_norm(ker.values - exact.values) / frobenius_norm(exact.values);
  EXPECT_NEAR(rows[1].rel_l2_error, ref, 1e-12);
}

TEST(GreensErrorStudy, AdvectionIncreasesError) {
  const auto g = pde::make_grid(1, 1000);
  const auto c0 = greens_error_study(0.0, {100}, g);
  const auto c10 = greens_error_study(10.0, {100}, g);
  EXPECT_GE(c10[0].rel_l2_error, c0[0].rel_l2_error);
}

// ---- serialization ----

TEST(TableIo, ConvergenceCsvHeaderAndPrecision) {
  ConvergenceTable t;
  t.rows.push_back({3, 0.1, 1.0 / 3.0, 2.0, 1e-300});
  std::ostringstream os;
  write_csv(os, t);
  EXPECT_EQ(os.str(),
            "n,lambda_next,err,m_norm,bound\n"
            "3,0.10000000000000001,0.33333333333333331,2,1e-300\n");
}

TEST(TableIo, SweepAndGreensCsvHeaders) {
  SweepTable s;
  s.rows.push_back({2.0, 0.5, 3.0});
  std::ostringstream os;
  write_csv(os, s);
  EXPECT_EQ(os.str(), "c_mag,err_at_n,m_norm_final\n2,0.5,3\n");
  std::ostringstream gs;
  write_csv(gs, std::vector<GreensErrorRow>{{200, 0.25}});
  EXPECT_EQ(gs.str(), "n,rel_l2_error\n200,0.25\n");
}

TEST(TableIo, CsvRoundTripsDoubles) {
  const auto resp = random_response(20, 10, 3);
  const auto table = convergence_study(resp, all_n(10));
  std::ostringstream os;
  write_csv(os, table);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  for (const auto& row : table.rows) {
    std::getline(is, line);
    std::vector<double> fields;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) fields.push_back(std::stod(cell));
    ASSERT_EQ(fields.size(), 5u);
    EXPECT_EQ(fields[2], row.err);
    EXPECT_EQ(fields[4], row.bound);
  }
}

TEST(TableIo, JsonContainsRows) {
  SweepTable s;
  s.n_fixed = 7;
  s.rows.push_back({1.0, 0.5, 3.0});
  std::ostringstream os;
  write_json(os, s);
  EXPECT_NE(os.str().find("\"n_fixed\": 7"), std::string::npos);
  EXPECT_NE(os.str().find("\"err_at_n\": 0.5"), std::string::npos);
}
