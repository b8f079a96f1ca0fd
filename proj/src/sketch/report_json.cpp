#include "json.hpp"

#include "opfree/sketch.hpp"

namespace opfree::sketch {

std::string to_json(const BoundReport& report) {
  nlohmann::ordered_json j;
  j["upper"] = report.upper ? nlohmann::ordered_json(*report.upper) : nlohmann::ordered_json();
  j["lower"] = report.lower;
  j["c_constant"] = report.c_constant;
  j["fx_norm"] = report.fx_norm;
  return j.dump();
}

std::string to_json(const MembershipReport& report) {
  nlohmann::ordered_json j;
  j["rank_ok"] = report.rank_ok;
  j["sketch_residual"] = report.sketch_residual;
  j["symmetry_delta"] = report.symmetry_delta;
  j["in_set"] = report.in_set;
  return j.dump();
}

}  // namespace opfree::sketch
