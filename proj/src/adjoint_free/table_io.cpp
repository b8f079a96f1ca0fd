#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"

#include "opfree/adjoint_free.hpp"

namespace opfree::adjoint_free {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, const ConvergenceTable& table) {
  os << "n,lambda_next,err,m_norm,bound\n";
  for (const auto& r : table.rows) {
    os << r.n << ',' << g17(r.lambda_next) << ',' << g17(r.err) << ',' << g17(r.m_norm) << ','
       << g17(r.bound) << '\n';
  }
}

void write_csv(std::ostream& os, const SweepTable& table) {
  os << "c_mag,err_at_n,m_norm_final\n";
  for (const auto& r : table.rows) {
    os << g17(r.c_mag) << ',' << g17(r.err_at_n) << ',' << g17(r.m_norm_final) << '\n';
  }
}

void write_csv(std::ostream& os, const std::vector<GreensErrorRow>& rows) {
  os << "n,rel_l2_error\n";
  for (const auto& r : rows) os << r.n << ',' << g17(r.rel_l2_error) << '\n';
}

void write_json(std::ostream& os, const ConvergenceTable& table) {
  nlohmann::ordered_json j;
  j["n_queries"] = table.n_queries;
  j["m_norm_final"] = table.m_norm_final;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"n", r.n},
                    {"lambda_next", r.lambda_next},
                    {"err", r.err},
                    {"m_norm", r.m_norm},
                    {"bound", r.bound}});
  }
  os << j.dump(2) << '\n';
}

void write_json(std::ostream& os, const SweepTable& table) {
  nlohmann::ordered_json j;
  j["n_fixed"] = table.n_fixed;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    rows.push_back(
        {{"c_mag", r.c_mag}, {"err_at_n", r.err_at_n}, {"m_norm_final", r.m_norm_final}});
  }
  os << j.dump(2) << '\n';
}

void write_json(std::ostream& os, const std::vector<GreensErrorRow>& rows) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& r : rows) j.push_back({{"n", r.n}, {"rel_l2_error", r.rel_l2_error}});
  os << j.dump(2) << '\n';
}

}  // namespace opfree::adjoint_free
