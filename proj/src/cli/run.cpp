#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "opfree/adjoint_free.hpp"
#include "opfree/cli.hpp"
#include "opfree/error.hpp"
#include "opfree/selfcheck.hpp"
#include "opfree/sketch.hpp"

namespace opfree::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace af = adjoint_free;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

[[noreturn]] void usage(const std::string& msg) {
  throw Error(ErrorKind::InvalidArgument, "cli", msg);
}

// Table goes to out_path when set, otherwise to `out` ahead of the summary.
void emit(const RunConfig& cfg, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (cfg.out_path.empty()) {
    body(out);
    return;
  }
  std::ofstream file(cfg.out_path, std::ios::binary);
  if (!file) usage("--out: cannot open '" + cfg.out_path + "' for writing");
  body(file);
  if (!file) usage("--out: write to '" + cfg.out_path + "' failed");
}

const char* pass_fail(bool ok) { return ok ? "pass" : "fail"; }

Exit converge(const RunConfig& cfg, std::ostream& out) {
  const pde::Grid grid = pde::make_grid(cfg.dim, cfg.grid_points);
  const pde::EigenBasis basis = cfg.dim == 1 ? pde::sine_basis_1d(cfg.n_queries, grid)
                                             : pde::sine_basis_2d(cfg.n_queries, grid);
  const pde::DiscreteOperator op = cfg.dim == 1
                                       ? pde::assemble_1d(cfg.nu, cfg.c[0], cfg.r, grid)
                                       : pde::assemble_2d(cfg.nu, {cfg.c[0], cfg.c[1]}, cfg.r, grid);
  const af::ResponseMatrix resp = af::query_forward(op, basis, cfg.n_queries, cfg.threads);
  const auto n_list = cfg.n_list.empty() ? af::default_n_list(cfg.n_queries) : cfg.n_list;
  af::StudyOptions opts;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;

  if (cfg.command == "lastar") {
    const af::LastarCurve curve = af::lastar_curve(resp, n_list, opts);
    emit(cfg, out, [&](std::ostream& os) {
      if (cfg.format == Format::Json) {
        Json j;
        j["n_queries"] = cfg.n_queries;
        j["m_norm_final"] = curve.m_norm_final;
        auto& rows = j["rows"] = Json::array();
        for (std::size_t i = 0; i < n_list.size(); ++i)
          rows.push_back({{"n", n_list[i]}, {"m_norm", curve.m_norm[i]}});
        os << j.dump(2) << '\n';
      } else {
        os << "n,m_norm\n";
        for (std::size_t i = 0; i < n_list.size(); ++i)
          os << n_list[i] << ',' << fmt("%.17g", curve.m_norm[i]) << '\n';
        if (n_list.empty() || n_list.back() != cfg.n_queries)
          os << cfg.n_queries << ',' << fmt("%.17g", curve.m_norm_final) << '\n';
      }
    });
    out << "m_norm_final=" << fmt("%.10g", curve.m_norm_final) << " queries=" << cfg.n_queries
        << '\n';
    return Exit::Ok;
  }

  const af::ConvergenceTable table = af::convergence_study(resp, n_list, opts);
  const af::CertificateReport cert = af::bound_certificate(table);
  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == Format::Json) af::write_json(os, table);
    else af::write_csv(os, table);
  });

  std::string rate = "slope=na r2=na";
  try {
    const af::RateFit fit = af::rate_fit(table, cfg.fit_min, cfg.fit_max);
    rate = "slope=" + fmt("%.4f", fit.slope) + " r2=" + fmt("%.4f", fit.r2);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientData) throw;
  }
  out << "m_norm_final=" << fmt("%.10g", table.m_norm_final) << ' ' << rate
      << " certificate=" << pass_fail(cert.passed)
      << " worst_ratio=" << fmt("%.6g", cert.worst_ratio) << '\n';
  return cert.passed ? Exit::Ok : Exit::CertificateFailure;
}

Exit greens_error(const RunConfig& cfg, std::ostream& out) {
  const pde::Grid grid = pde::make_grid(1, cfg.grid_points);
  const auto rows = af::greens_error_study(cfg.c[0], cfg.n_list, grid, cfg.threads);
  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == Format::Json) af::write_json(os, rows);
    else af::write_csv(os, rows);
  });
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].rel_l2_error > rows[i - 1].rel_l2_error + 1e-12) monotone = false;
  out << "rel_l2_error=" << fmt("%.6g", rows.back().rel_l2_error) << " n=" << rows.back().n
      << " monotone=" << pass_fail(monotone) << '\n';
  return monotone ? Exit::Ok : Exit::CertificateFailure;
}

Exit perturb_sweep(const RunConfig& cfg, std::ostream& out) {
  const pde::Grid grid = pde::make_grid(1, cfg.grid_points);
  af::StudyOptions opts;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;
  const af::SweepTable table =
      af::perturbation_sweep(cfg.c_values, cfg.n_fixed, cfg.n_queries, grid, opts);
  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == Format::Json) af::write_json(os, table);
    else af::write_csv(os, table);
  });

  // err(n) <= ‖M_N‖ / λ_{n+1} with λ_{n+1} = π² (n+1)².
  const double pi = std::acos(-1.0);
  const double nn = static_cast<double>(cfg.n_fixed + 1);
  const double lambda_next = pi * pi * nn * nn;
  bool cert = true;
  bool increasing = true;
  std::vector<double> cs, errs;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (!(row.err_at_n <= row.m_norm_final / lambda_next * (1.0 + 1e-8))) cert = false;
    if (i > 0 && !(row.err_at_n > table.rows[i - 1].err_at_n)) increasing = false;
    cs.push_back(row.c_mag);
    errs.push_back(row.err_at_n);
  }
  std::string stats = "spearman=na slope=na r2=na";
  if (cs.size() >= 2) {
    const af::RateFit fit = af::linear_fit(cs, errs);
    stats = "spearman=" + fmt("%.6g", af::spearman(cs, errs)) + " slope=" + fmt("%.6g", fit.slope) +
            " r2=" + fmt("%.4f", fit.r2);
  }
  out << stats << " increasing=" << (increasing ? "yes" : "no")
      << " certificate=" << pass_fail(cert) << '\n';
  return cert ? Exit::Ok : Exit::CertificateFailure;
}

sketch::SketchInstance make_instance(const RunConfig& cfg) {
  sketch::InstanceSpec spec;
  spec.n = cfg.n;
  spec.k = cfg.k;
  spec.s = cfg.s;
  spec.delta = cfg.delta;
  spec.epsilon = cfg.epsilon;
  return sketch::make_near_symmetric_instance(spec, cfg.seed);
}

Exit sketch_bounds(const RunConfig& cfg, std::ostream& out) {
  const auto inst = make_instance(cfg);
  const sketch::BoundReport rep = sketch::diameter_upper_bound(inst);
  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == Format::Json) {
      os << sketch::to_json(rep) << '\n';
    } else {
      os << "upper,lower,c_constant,fx_norm\n"
         << (rep.upper ? fmt("%.17g", *rep.upper) : std::string()) << ','
         << fmt("%.17g", rep.lower) << ',' << fmt("%.17g", rep.c_constant) << ','
         << fmt("%.17g", rep.fx_norm) << '\n';
    }
  });
  const bool ok = !rep.upper || rep.lower <= *rep.upper;
  out << "upper=" << (rep.upper ? fmt("%.10g", *rep.upper) : std::string("none"))
      << " lower=" << fmt("%.10g", rep.lower) << " c=" << fmt("%.10g", rep.c_constant)
      << " certificate=" << pass_fail(ok) << '\n';
  return ok ? Exit::Ok : Exit::CertificateFailure;
}

Exit sketch_witness(const RunConfig& cfg, std::ostream& out) {
  const auto inst = make_instance(cfg);
  const sketch::BoundReport rep = sketch::diameter_upper_bound(inst);
  const sketch::ExtremalPair pair = sketch::construct_extremal_pair(inst);
  const double tol = sketch::default_membership_tol(inst);
  const auto mp = sketch::membership_check(pair.b_plus, inst, tol);
  const auto mm = sketch::membership_check(pair.b_minus, inst, tol);
  const double gap = spectral_norm_exact(pair.b_plus - pair.b_minus);
  const bool above = gap >= rep.lower - 1e-9;
  const bool below = !rep.upper || gap <= *rep.upper + 1e-9;
  const bool ok = mp.in_set && mm.in_set && above && below;

  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == Format::Json) {
      Json j;
      j["eta"] = pair.eta;
      j["gap"] = gap;
      j["lower"] = rep.lower;
      j["upper"] = rep.upper ? Json(*rep.upper) : Json();
      j["b_plus"] = Json::parse(sketch::to_json(mp));
      j["b_minus"] = Json::parse(sketch::to_json(mm));
      j["degenerate_gap"] = pair.degenerate_gap;
      os << j.dump(2) << '\n';
    } else {
      os << "eta,gap,lower,upper,b_plus_in_set,b_minus_in_set\n"
         << fmt("%.17g", pair.eta) << ',' << fmt("%.17g", gap) << ',' << fmt("%.17g", rep.lower)
         << ',' << (rep.upper ? fmt("%.17g", *rep.upper) : std::string()) << ','
         << (mp.in_set ? 1 : 0) << ',' << (mm.in_set ? 1 : 0) << '\n';
    }
  });
  out << "gap=" << fmt("%.10g", gap) << " lower=" << fmt("%.10g", rep.lower)
      << " upper=" << (rep.upper ? fmt("%.10g", *rep.upper) : std::string("none"))
      << " members=" << ((mp.in_set && mm.in_set) ? "yes" : "no")
      << " certificate=" << pass_fail(ok) << '\n';
  return ok ? Exit::Ok : Exit::CertificateFailure;
}

Exit toeplitz_demo(const RunConfig& cfg, std::ostream& out) {
  Rng rng(cfg.seed);
  std::vector<double> symbol(2 * cfg.n - 1);
  for (double& v : symbol) v = rng.normal();
  const DenseMatrix t = sketch::toeplitz_from_symbol(symbol);
  std::size_t queries = 0;
  const sketch::MatVecOracle oracle = [&](std::span<const double> v) {
    ++queries;
    return matvec(t, v);
  };
  const DenseMatrix rec = sketch::toeplitz_from_two_queries(oracle, cfg.n);
  const double err = max_abs(rec - t);
  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == Format::Json) {
      Json j;
      j["n"] = cfg.n;
      j["queries"] = queries;
      j["max_abs_err"] = err;
      os << j.dump(2) << '\n';
    } else {
      os << "n,queries,max_abs_err\n" << cfg.n << ',' << queries << ',' << fmt("%.17g", err) << '\n';
    }
  });
  const bool ok = queries == 2 && err == 0.0;
  out << "queries=" << queries << " max_abs_err=" << fmt("%.17g", err) << '\n';
  return ok ? Exit::Ok : Exit::CertificateFailure;
}

Exit run_selfcheck(const RunConfig& cfg, std::ostream& out) {
  const selfcheck::SuiteResult suites[] = {
      selfcheck::rotation_distance_identity(100, cfg.seed.split(1)),
      selfcheck::truncated_bound(200, cfg.seed.split(2)),
      selfcheck::witness_sandwich(50, cfg.seed.split(3)),
  };
  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == Format::Json) {
      auto j = Json::array();
      for (const auto& s : suites)
        j.push_back({{"suite", s.name},
                     {"trials", s.trials},
                     {"failures", s.failures},
                     {"worst", s.worst},
                     {"passed", s.passed()}});
      os << j.dump(2) << '\n';
    } else {
      os << "suite,trials,failures,worst\n";
      for (const auto& s : suites)
        os << s.name << ',' << s.trials << ',' << s.failures << ',' << fmt("%.17g", s.worst) << '\n';
    }
  });
  bool ok = true;
  for (const auto& s : suites) {
    out << s.name << '=' << (s.trials - s.failures) << '/' << s.trials << ' ';
    ok = ok && s.passed();
  }
  out << "certificate=" << pass_fail(ok) << '\n';
  return ok ? Exit::Ok : Exit::CertificateFailure;
}

Exit exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::SingularOperator:
    case ErrorKind::RankDeficient:
      return Exit::Numerical;
    default:
      return Exit::Usage;
  }
}

}  // namespace

Exit run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "converge-1d" || cfg.command == "converge-2d" || cfg.command == "lastar")
      return converge(cfg, out);
    if (cfg.command == "greens-error") return greens_error(cfg, out);
    if (cfg.command == "perturb-sweep") return perturb_sweep(cfg, out);
    if (cfg.command == "sketch-bounds") return sketch_bounds(cfg, out);
    if (cfg.command == "sketch-witness") return sketch_witness(cfg, out);
    if (cfg.command == "toeplitz-demo") return toeplitz_demo(cfg, out);
    if (cfg.command == "selfcheck") return run_selfcheck(cfg, out);
    usage("unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    err << "error [" << e.module() << ": " << to_string(e.kind()) << "] " << e.what() << '\n';
    return exit_for(e.kind());
  }
}

namespace {

struct Flags {
  std::uint64_t seed = 1;
  std::string format = "csv";
};

void add_common(CLI::App* sub, RunConfig& cfg, Flags& flags) {
  sub->add_option("--seed", flags.seed, "RNG seed");
  sub->add_option("--out", cfg.out_path, "Output file (default: stdout)");
  sub->add_option("--format", flags.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

void add_pde(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--grid", cfg.grid_points, "Interior grid points per axis")
      ->check(CLI::PositiveNumber);
  sub->add_option("--threads", cfg.threads, "Worker threads for the column solves")
      ->check(CLI::PositiveNumber);
}

void add_operator(CLI::App* sub, RunConfig& cfg) {
  add_pde(sub, cfg);
  sub->add_option("--queries", cfg.n_queries, "Number of eigenfunction queries N")
      ->check(CLI::PositiveNumber);
  sub->add_option("--n-list", cfg.n_list, "Comma-separated ascending n values")->delimiter(',');
  sub->add_option("--nu", cfg.nu, "Diffusion coefficient");
  sub->add_option("--c", cfg.c, "Advection coefficient(s), comma-separated in 2D")->delimiter(',');
  sub->add_option("--r", cfg.r, "Reaction coefficient");
  sub->add_option("--fit-min", cfg.fit_min, "Lower end of the rate-fit window");
  sub->add_option("--fit-max", cfg.fit_max, "Upper end of the rate-fit window");
}

void add_instance(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--n", cfg.n, "Matrix dimension")->check(CLI::PositiveNumber);
  sub->add_option("--k", cfg.k, "Rank")->check(CLI::PositiveNumber);
  sub->add_option("--s", cfg.s, "Number of test vectors")->check(CLI::PositiveNumber);
  sub->add_option("--delta", cfg.delta, "Near-symmetry of the hidden matrix");
  sub->add_option("--epsilon", cfg.epsilon, "Near-symmetry prior of the ambiguity set");
}

template <typename T>
void default_if(CLI::App* sub, const char* flag, T& field, T value) {
  if (sub->count(flag) == 0) field = value;
}

void fill_defaults(CLI::App* sub, RunConfig& cfg) {
  const std::string& cmd = cfg.command;
  if (cmd == "converge-1d" || cmd == "lastar") {
    default_if(sub, "--nu", cfg.nu, 0.25);
    default_if(sub, "--c", cfg.c, std::vector<double>{5.0});
    default_if(sub, "--r", cfg.r, 1.0);
    default_if<std::size_t>(sub, "--grid", cfg.grid_points, 4000);
    default_if<std::size_t>(sub, "--queries", cfg.n_queries, 601);
    default_if<std::size_t>(sub, "--fit-min", cfg.fit_min, 32);
    default_if<std::size_t>(sub, "--fit-max", cfg.fit_max, 512);
    if (cmd == "lastar" && sub->count("--dim") != 0 && cfg.dim == 2) {
      default_if(sub, "--nu", cfg.nu, 1.0);
      default_if(sub, "--c", cfg.c, std::vector<double>{10.0, 5.0});
      default_if(sub, "--r", cfg.r, 0.0);
      default_if<std::size_t>(sub, "--grid", cfg.grid_points, 96);
      default_if<std::size_t>(sub, "--queries", cfg.n_queries, 300);
    }
  } else if (cmd == "converge-2d") {
    cfg.dim = 2;
    default_if(sub, "--nu", cfg.nu, 1.0);
    default_if(sub, "--c", cfg.c, std::vector<double>{10.0, 5.0});
    default_if(sub, "--r", cfg.r, 0.0);
    default_if<std::size_t>(sub, "--grid", cfg.grid_points, 96);
    default_if<std::size_t>(sub, "--queries", cfg.n_queries, 300);
    default_if<std::size_t>(sub, "--fit-min", cfg.fit_min, 16);
    default_if<std::size_t>(sub, "--fit-max", cfg.fit_max, 256);
  } else if (cmd == "greens-error") {
    default_if(sub, "--c", cfg.c, std::vector<double>{0.0});
    default_if<std::size_t>(sub, "--grid", cfg.grid_points, 1000);
    default_if(sub, "--n-list", cfg.n_list, std::vector<std::size_t>{25, 50, 100, 200});
  } else if (cmd == "perturb-sweep") {
    std::vector<double> cs;
    for (int i = 0; i <= 10; ++i) cs.push_back(2.0 * i);
    default_if(sub, "--c-values", cfg.c_values, cs);
    default_if<std::size_t>(sub, "--grid", cfg.grid_points, 1000);
    default_if<std::size_t>(sub, "--queries", cfg.n_queries, 401);
  } else if (cmd == "sketch-bounds" || cmd == "sketch-witness") {
    default_if<std::size_t>(sub, "--n", cfg.n, 8);
  } else if (cmd == "toeplitz-demo") {
    default_if<std::size_t>(sub, "--n", cfg.n, 50);
  }
}

void validate_config(const RunConfig& cfg) {
  for (std::size_t i = 1; i < cfg.n_list.size(); ++i)
    if (cfg.n_list[i] <= cfg.n_list[i - 1]) usage("--n-list must be strictly ascending");
  for (std::size_t n : cfg.n_list)
    if (n == 0) usage("--n-list entries must be positive");
  const bool two_d = cfg.dim == 2;
  const bool uses_c = cfg.command == "converge-1d" || cfg.command == "converge-2d" ||
                      cfg.command == "lastar" || cfg.command == "greens-error";
  if (uses_c && cfg.c.size() != (two_d ? 2u : 1u))
    usage(std::string("--c expects ") + (two_d ? "two comma-separated values" : "one value"));
  if ((cfg.command == "converge-1d" || cfg.command == "converge-2d" || cfg.command == "lastar") &&
      cfg.nu == 0.0)
    usage("--nu must be nonzero");
  if (cfg.command == "toeplitz-demo" && cfg.n < 2) usage("--n must be at least 2");
}

}  // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adjoint-free operator recovery experiments"};
  app.require_subcommand(1);
  RunConfig cfg;
  Flags flags;

  std::map<std::string, CLI::App*> subs;
  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, cfg, flags);
    subs[name] = sub;
    return sub;
  };

  add_instance(add("sketch-bounds", "Diameter bounds for a near-symmetric instance"), cfg);
  add_instance(add("sketch-witness", "Extremal witness pair and membership checks"), cfg);
  add("toeplitz-demo", "Toeplitz recovery from two products")
      ->add_option("--n", cfg.n, "Matrix dimension")
      ->check(CLI::PositiveNumber);
  add_operator(add("converge-1d", "1D convergence study with certificate"), cfg);
  add_operator(add("converge-2d", "2D convergence study with certificate"), cfg);
  CLI::App* lastar = add("lastar", "‖M_n‖ curve, the estimate of ‖LA*‖");
  add_operator(lastar, cfg);
  lastar->add_option("--dim", cfg.dim, "Spatial dimension")->check(CLI::IsMember({1, 2}));
  CLI::App* greens = add("greens-error", "Kernel error against the closed-form Green's function");
  add_pde(greens, cfg);
  greens->add_option("--n-list", cfg.n_list, "Comma-separated ascending n values")->delimiter(',');
  greens->add_option("--c", cfg.c, "Advection coefficient")->delimiter(',');
  CLI::App* sweep = add("perturb-sweep", "Error at fixed n as the advection grows");
  add_pde(sweep, cfg);
  sweep->add_option("--c-values", cfg.c_values, "Comma-separated ascending c values")
      ->delimiter(',');
  sweep->add_option("--n-fixed", cfg.n_fixed, "n at which the error is recorded")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--queries", cfg.n_queries, "Number of eigenfunction queries N")
      ->check(CLI::PositiveNumber);
  add("selfcheck", "Brute-force invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(Exit::Usage);
  }

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    cfg.command = name;
    fill_defaults(sub, cfg);
  }
  cfg.seed = Seed{flags.seed};
  cfg.format = flags.format == "json" ? Format::Json : Format::Csv;
  try {
    validate_config(cfg);
  } catch (const Error& e) {
    err << "usage error: " << e.what() << '\n';
    return static_cast<int>(Exit::Usage);
  }
  return static_cast<int>(run(cfg, out, err));
}

}  // namespace opfree::cli
