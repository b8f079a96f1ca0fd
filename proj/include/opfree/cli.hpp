#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "opfree/rng.hpp"

namespace opfree::cli {

enum class Exit : int {
  Ok = 0,
  CertificateFailure = 1,
  Usage = 2,
  Numerical = 3,
};

enum class Format { Csv, Json };

/// Parsed command line. Fields a command does not use keep their defaults;
/// per-command defaults are filled in by parse().
struct RunConfig {
  std::string command;
  Seed seed{1};
  std::size_t grid_points = 0;
  std::size_t n_queries = 0;
  std::vector<std::size_t> n_list;  // empty: default list for the command
  double nu = 0.0;
  std::vector<double> c;  // one value in 1D, two in 2D
  double r = 0.0;
  std::vector<double> c_values;
  std::size_t n_fixed = 100;
  std::size_t fit_min = 0;
  std::size_t fit_max = 0;
  int dim = 1;
  // sketch and toeplitz instances
  std::size_t n = 0;
  std::size_t k = 2;
  std::size_t s = 4;
  double delta = 1e-4;
  double epsilon = 1e-3;
  std::string out_path;  // empty: table goes to stdout before the summary
  Format format = Format::Csv;
  unsigned threads = 1;
};

/// Runs one command: writes its table/report to config.out_path (or `out`)
/// and a one-line summary to `out`; diagnostics go to `err`.
Exit run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (subcommand first) and runs it. Returns the process exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace opfree::cli
