#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "opfree/adjoint_free.hpp"
#include "opfree/error.hpp"

namespace opfree::adjoint_free {

namespace {

void check_n_list(const std::vector<std::size_t>& n_list, std::size_t limit, bool allow_limit) {
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0) {
      throw Error(ErrorKind::InvalidArgument, "adjoint-free", "n_list entries must be >= 1");
    }
    if (i > 0 && n_list[i] <= n_list[i - 1]) {
      throw Error(ErrorKind::InvalidArgument, "adjoint-free", "n_list must be strictly ascending");
    }
    if (n_list[i] > limit || (!allow_limit && n_list[i] == limit)) {
      throw Error(ErrorKind::EmptyTail, "adjoint-free",
                  "n = " + std::to_string(n_list[i]) + " leaves no trailing queries out of N = " +
                      std::to_string(limit));
    }
  }
}

// Symmetric Gram of the columns scaled by lambda: (λ_i λ_j G_ij).
DenseMatrix scaled_gram(const DenseMatrix& g, const std::vector<double>& lambdas) {
  DenseMatrix h = g;
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) h(i, j) *= lambdas[i] * lambdas[j];
  return h;
}

}  // namespace

ConvergenceTable error_curve(const ResponseMatrix& resp, const std::vector<std::size_t>& n_list,
                             const StudyOptions& opts) {
  const std::size_t big_n = resp.n_queries();
  check_n_list(n_list, big_n, false);
  const DenseMatrix g = gram(resp.columns);

  ConvergenceTable table;
  table.n_queries = big_n;
  table.rows.resize(n_list.size());
  // Largest n first: each tail contains the next smaller one, so the previous
  // Ritz vector (zero-padded in front) is a valid warm start and the computed
  // errors are nonincreasing in n.
  std::vector<double> warm;
  for (std::size_t idx = n_list.size(); idx-- > 0;) {
    const std::size_t n = n_list[idx];
    const std::size_t len = big_n - n;
    const DenseMatrix tail = g.block(n, n, len, len);
    std::vector<double> start;
    if (!warm.empty()) {
      start.assign(len - warm.size(), 0.0);
      start.insert(start.end(), warm.begin(), warm.end());
    }
    const NormEstimate est = gram_spectral_norm(tail, opts.power, opts.seed.split(n), start);
    warm = est.ritz_vector;

    auto& row = table.rows[idx];
    row.n = n;
    row.lambda_next = resp.lambdas[n];
    row.err = est.value;
  }
  return table;
}

LastarCurve lastar_curve(const ResponseMatrix& resp, const std::vector<std::size_t>& n_list,
                         const StudyOptions& opts) {
  const std::size_t big_n = resp.n_queries();
  check_n_list(n_list, big_n, true);
  const DenseMatrix h = scaled_gram(gram(resp.columns), resp.lambdas);

  std::vector<std::size_t> sizes = n_list;
  if (sizes.empty() || sizes.back() != big_n) sizes.push_back(big_n);

  LastarCurve curve;
  std::vector<double> warm;
  std::vector<double> values;
  values.reserve(sizes.size());
  for (std::size_t n : sizes) {
    const DenseMatrix lead = h.block(0, 0, n, n);
    std::vector<double> start;
    if (!warm.empty()) {
      start = warm;
      start.resize(n, 0.0);
    }
    const NormEstimate est =
        gram_spectral_norm(lead, opts.power, opts.seed.split(0x10000 + n), start);
    warm = est.ritz_vector;
    values.push_back(est.value);
  }
  curve.m_norm.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n_list.size()));
  curve.m_norm_final = values.back();
  return curve;
}

ConvergenceTable convergence_study(const ResponseMatrix& resp,
                                   const std::vector<std::size_t>& n_list,
                                   const StudyOptions& opts) {
  ConvergenceTable table = error_curve(resp, n_list, opts);
  const LastarCurve curve = lastar_curve(resp, n_list, opts);
  table.m_norm_final = curve.m_norm_final;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto& row = table.rows[i];
    row.m_norm = curve.m_norm[i];
    row.bound = curve.m_norm_final / row.lambda_next;
  }
  return table;
}

CertificateReport bound_certificate(const ConvergenceTable& table) {
  CertificateReport report;
  for (const auto& row : table.rows) {
    const double bound = table.m_norm_final / row.lambda_next;
    const double ratio = row.err == 0.0 ? 0.0 : (bound > 0.0 ? row.err / bound
                                                               : std::numeric_limits<double>::infinity());
    if (report.worst_n == 0 || ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_n = row.n;
    }
    if (!(row.err <= bound * (1.0 + 1e-8))) report.passed = false;
  }
  return report;
}

RateFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::InsufficientData, "adjoint-free", "linear_fit needs two or more points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) {
    throw Error(ErrorKind::InsufficientData, "adjoint-free", "linear_fit: abscissae coincide");
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = x.size();
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

RateFit rate_fit(const ConvergenceTable& table, std::size_t n_min, std::size_t n_max) {
  std::vector<double> lx, ly;
  for (const auto& row : table.rows) {
    if (row.n < n_min || row.n > n_max || !(row.err > 1e-13)) continue;
    lx.push_back(std::log(static_cast<double>(row.n)));
    ly.push_back(std::log(row.err));
  }
  if (lx.size() < 5) {
    throw Error(ErrorKind::InsufficientData, "adjoint-free",
                "rate_fit: " + std::to_string(lx.size()) + " usable rows in [" +
                    std::to_string(n_min) + ", " + std::to_string(n_max) + "], need 5");
  }
  return linear_fit(lx, ly);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::InsufficientData, "adjoint-free", "spearman needs two or more pairs");
  }
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = 0.5 * (n + 1.0);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<std::size_t> default_n_list(std::size_t n_queries) {
  std::vector<std::size_t> out;
  if (n_queries < 2) return out;
  for (std::size_t p = 1; p < n_queries - 1; p *= 2) out.push_back(p);
  out.push_back(n_queries - 1);
  return out;
}

}  // namespace opfree::adjoint_free
