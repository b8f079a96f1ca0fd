#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "opfree/adjoint_free.hpp"
#include "opfree/error.hpp"
#include "opfree/linalg.hpp"
#include "opfree/pde.hpp"
#include "opfree/selfcheck.hpp"
#include "opfree/sketch.hpp"

namespace py = pybind11;
using namespace opfree;
namespace af = opfree::adjoint_free;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  const auto r = static_cast<std::size_t>(a.shape(0));
  const auto c = static_cast<std::size_t>(a.shape(1));
  return DenseMatrix(r, c, std::vector<double>(a.data(), a.data() + r * c));
}

py::array_t<double> to_array(const DenseMatrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

sketch::SketchInstance instance(const Array& f, const Array& x, std::size_t k, double delta,
                                double epsilon) {
  sketch::SketchInstance inst{to_matrix(f), to_matrix(x), k, delta, epsilon};
  sketch::validate(inst);
  return inst;
}

af::ResponseMatrix responses(int dim, double nu, std::vector<double> c, double r,
                             std::size_t grid_points, std::size_t n_queries, unsigned threads) {
  if (c.size() != static_cast<std::size_t>(dim)) throw py::value_error("c needs one entry per dimension");
  const pde::Grid grid = pde::make_grid(dim, grid_points);
  const auto basis =
      dim == 1 ? pde::sine_basis_1d(n_queries, grid) : pde::sine_basis_2d(n_queries, grid);
  const auto op = dim == 1 ? pde::assemble_1d(nu, c[0], r, grid)
                           : pde::assemble_2d(nu, {c[0], c[1]}, r, grid);
  return af::query_forward(op, basis, n_queries, threads);
}

py::dict table_dict(const af::ConvergenceTable& t) {
  std::vector<double> n, lam, err, m, bound;
  for (const auto& row : t.rows) {
    n.push_back(static_cast<double>(row.n));
    lam.push_back(row.lambda_next);
    err.push_back(row.err);
    m.push_back(row.m_norm);
    bound.push_back(row.bound);
  }
  const auto cert = af::bound_certificate(t);
  py::dict d;
  d["n"] = to_array(n);
  d["lambda_next"] = to_array(lam);
  d["err"] = to_array(err);
  d["m_norm"] = to_array(m);
  d["bound"] = to_array(bound);
  d["m_norm_final"] = t.m_norm_final;
  d["n_queries"] = t.n_queries;
  d["certificate"] = cert.passed;
  d["worst_ratio"] = cert.worst_ratio;
  return d;
}

}  // namespace

PYBIND11_MODULE(_opfree, m) {
  m.doc() = "Adjoint-free operator recovery: sketch bounds, PDE queries, convergence studies";

  static py::exception<Error> error_type(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg =
          std::string(to_string(e.kind())) + " [" + std::string(e.module()) + "]: " + e.what();
      py::set_error(error_type, msg.c_str());
    }
  });

  // linalg
  m.def("singular_values", [](const Array& a) { return to_array(singular_values(to_matrix(a))); });
  m.def(
      "spectral_norm",
      [](const Array& a, double tol, std::size_t max_iter, std::uint64_t seed) {
        return spectral_norm(to_matrix(a), tol, max_iter, Seed{seed});
      },
      py::arg("m"), py::arg("tol") = 1e-10, py::arg("max_iter") = 10000, py::arg("seed") = 1);
  m.def("principal_angles", [](const Array& u, const Array& v) {
    return to_array(principal_angles(to_matrix(u), to_matrix(v)));
  });
  m.def("numerical_rank", [](const Array& a, double tol) { return numerical_rank(to_matrix(a), tol); },
        py::arg("m"), py::arg("tol") = 1e-10);

  // sketch recovery
  m.def("near_symmetry_delta", [](const Array& f) { return sketch::near_symmetry_delta(to_matrix(f)); });
  m.def("diameter_lower_bound", [](const Array& f, double epsilon, double delta) {
    return sketch::diameter_lower_bound(to_matrix(f), epsilon, delta);
  });
  m.def(
      "make_instance",
      [](std::size_t n, std::size_t k, std::size_t s, double delta, double epsilon,
         std::uint64_t seed) {
        const auto inst =
            sketch::make_near_symmetric_instance({n, k, s, delta, epsilon}, Seed{seed});
        py::dict d;
        d["f"] = to_array(inst.f);
        d["x"] = to_array(inst.x);
        d["k"] = inst.k;
        d["delta"] = inst.delta;
        d["epsilon"] = inst.epsilon;
        return d;
      },
      py::arg("n"), py::arg("k"), py::arg("s"), py::arg("delta"), py::arg("epsilon"),
      py::arg("seed") = 1);
  m.def(
      "diameter_bounds",
      [](const Array& f, const Array& x, std::size_t k, double delta, double epsilon) {
        const auto rep = sketch::diameter_upper_bound(instance(f, x, k, delta, epsilon));
        py::dict d;
        d["upper"] = rep.upper ? py::cast(*rep.upper) : py::none();
        d["lower"] = rep.lower;
        d["c_constant"] = rep.c_constant;
        d["fx_norm"] = rep.fx_norm;
        return d;
      },
      py::arg("f"), py::arg("x"), py::arg("k"), py::arg("delta"), py::arg("epsilon"));
  m.def(
      "extremal_pair",
      [](const Array& f, const Array& x, std::size_t k, double delta, double epsilon) {
        const auto pair = sketch::construct_extremal_pair(instance(f, x, k, delta, epsilon));
        py::dict d;
        d["b_plus"] = to_array(pair.b_plus);
        d["b_minus"] = to_array(pair.b_minus);
        d["eta"] = pair.eta;
        d["z"] = to_array(pair.z);
        d["degenerate_gap"] = pair.degenerate_gap;
        return d;
      },
      py::arg("f"), py::arg("x"), py::arg("k"), py::arg("delta"), py::arg("epsilon"));
  m.def(
      "membership_check",
      [](const Array& a, const Array& f, const Array& x, std::size_t k, double delta,
         double epsilon) {
        const auto inst = instance(f, x, k, delta, epsilon);
        const auto rep =
            sketch::membership_check(to_matrix(a), inst, sketch::default_membership_tol(inst));
        py::dict d;
        d["rank_ok"] = rep.rank_ok;
        d["sketch_residual"] = rep.sketch_residual;
        d["symmetry_delta"] = rep.symmetry_delta;
        d["in_set"] = rep.in_set;
        return d;
      },
      py::arg("a"), py::arg("f"), py::arg("x"), py::arg("k"), py::arg("delta"), py::arg("epsilon"));
  m.def("toeplitz_from_symbol", [](const std::vector<double>& symbol) {
    return to_array(sketch::toeplitz_from_symbol(symbol));
  });
  m.def(
      "toeplitz_recover",
      [](const std::function<py::array_t<double>(py::array_t<double>)>& matvec, std::size_t n) {
        const sketch::MatVecOracle oracle = [&](std::span<const double> v) {
          const py::array_t<double> r = matvec(to_array(std::vector<double>(v.begin(), v.end())));
          const auto buf = r.unchecked<1>();
          std::vector<double> out(static_cast<std::size_t>(buf.shape(0)));
          for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf(i);
          return out;
        };
        return to_array(sketch::toeplitz_from_two_queries(oracle, n));
      },
      py::arg("matvec"), py::arg("n"));

  // pde
  m.def(
      "sine_basis",
      [](int dim, std::size_t modes, std::size_t grid_points) {
        const pde::Grid grid = pde::make_grid(dim, grid_points);
        const auto b = dim == 1 ? pde::sine_basis_1d(modes, grid) : pde::sine_basis_2d(modes, grid);
        return py::make_tuple(to_array(b.lambdas), to_array(b.phis));
      },
      py::arg("dim"), py::arg("modes"), py::arg("grid_points"));
  m.def("greens_exact", &pde::greens_exact_convdiff, py::arg("c"), py::arg("x"), py::arg("y"));
  m.def(
      "query_responses",
      [](int dim, double nu, std::vector<double> c, double r, std::size_t grid_points,
         std::size_t n_queries, unsigned threads) {
        return to_array(responses(dim, nu, std::move(c), r, grid_points, n_queries, threads).columns);
      },
      py::arg("dim"), py::arg("nu"), py::arg("c"), py::arg("r"), py::arg("grid_points"),
      py::arg("n_queries"), py::arg("threads") = 1);

  // adjoint-free studies
  m.def(
      "convergence_study",
      [](int dim, double nu, std::vector<double> c, double r, std::size_t grid_points,
         std::size_t n_queries, std::vector<std::size_t> n_list, std::uint64_t seed,
         unsigned threads) {
        const auto resp = responses(dim, nu, std::move(c), r, grid_points, n_queries, threads);
        af::StudyOptions opts;
        opts.seed = Seed{seed};
        opts.threads = threads;
        if (n_list.empty()) n_list = af::default_n_list(n_queries);
        return table_dict(af::convergence_study(resp, n_list, opts));
      },
      py::arg("dim"), py::arg("nu"), py::arg("c"), py::arg("r"), py::arg("grid_points"),
      py::arg("n_queries"), py::arg("n_list") = std::vector<std::size_t>{}, py::arg("seed") = 1,
      py::arg("threads") = 1);
  m.def(
      "pseudo_inverse_study",
      [](int dim, std::size_t grid_points, std::size_t n_queries, std::vector<std::size_t> n_list) {
        const pde::Grid grid = pde::make_grid(dim, grid_points);
        const auto basis =
            dim == 1 ? pde::sine_basis_1d(n_queries, grid) : pde::sine_basis_2d(n_queries, grid);
        if (n_list.empty()) n_list = af::default_n_list(n_queries);
        return table_dict(af::convergence_study(af::pseudo_inverse_reference(basis, n_queries), n_list));
      },
      py::arg("dim"), py::arg("grid_points"), py::arg("n_queries"),
      py::arg("n_list") = std::vector<std::size_t>{});
  m.def(
      "rate_fit",
      [](const std::vector<double>& n, const std::vector<double>& err, double n_min, double n_max) {
        if (n.size() != err.size()) throw py::value_error("n and err differ in length");
        af::ConvergenceTable t;
        for (std::size_t i = 0; i < n.size(); ++i)
          t.rows.push_back({static_cast<std::size_t>(n[i]), 0.0, err[i], 0.0, 0.0});
        const auto fit = af::rate_fit(t, static_cast<std::size_t>(n_min), static_cast<std::size_t>(n_max));
        py::dict d;
        d["slope"] = fit.slope;
        d["intercept"] = fit.intercept;
        d["r2"] = fit.r2;
        d["points"] = fit.points;
        return d;
      },
      py::arg("n"), py::arg("err"), py::arg("n_min"), py::arg("n_max"));
  m.def(
      "perturbation_sweep",
      [](const std::vector<double>& c_values, std::size_t n_fixed, std::size_t n_queries,
         std::size_t grid_points, std::uint64_t seed) {
        af::StudyOptions opts;
        opts.seed = Seed{seed};
        const auto t =
            af::perturbation_sweep(c_values, n_fixed, n_queries, pde::make_grid(1, grid_points), opts);
        std::vector<double> c, err, m_final;
        for (const auto& row : t.rows) {
          c.push_back(row.c_mag);
          err.push_back(row.err_at_n);
          m_final.push_back(row.m_norm_final);
        }
        py::dict d;
        d["c_mag"] = to_array(c);
        d["err_at_n"] = to_array(err);
        d["m_norm_final"] = to_array(m_final);
        d["spearman"] = c.size() >= 2 ? py::cast(af::spearman(c, err)) : py::none();
        return d;
      },
      py::arg("c_values"), py::arg("n_fixed"), py::arg("n_queries"), py::arg("grid_points"),
      py::arg("seed") = 1);
  m.def(
      "greens_error_study",
      [](double c, const std::vector<std::size_t>& n_list, std::size_t grid_points) {
        std::vector<double> n, e;
        for (const auto& row : af::greens_error_study(c, n_list, pde::make_grid(1, grid_points))) {
          n.push_back(static_cast<double>(row.n));
          e.push_back(row.rel_l2_error);
        }
        return py::make_tuple(to_array(n), to_array(e));
      },
      py::arg("c"), py::arg("n_list"), py::arg("grid_points"));
  m.def(
      "selfcheck",
      [](std::uint64_t seed) {
        const Seed root{seed};
        py::dict d;
        for (const auto& s : {selfcheck::rotation_distance_identity(100, root.split(1)),
                              selfcheck::truncated_bound(200, root.split(2)),
                              selfcheck::witness_sandwich(50, root.split(3))}) {
          py::dict r;
          r["trials"] = s.trials;
          r["failures"] = s.failures;
          r["worst"] = s.worst;
          r["passed"] = s.passed();
          d[py::str(s.name)] = r;
        }
        return d;
      },
      py::arg("seed") = 1);
}
