#pragma once

#include <cstddef>
#include <string>

#include "opfree/rng.hpp"

namespace opfree::selfcheck {

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest violation metric seen (suite-specific)

  bool passed() const noexcept { return trials > 0 && failures == 0; }
};

/// Random orthonormal U, V (n <= 20, k <= n): |‖V − U Q₀‖₂² − 2(1 − σ_min(UᵀV))|
/// must stay below 1e-10. worst is the largest such gap.
SuiteResult rotation_distance_identity(std::size_t trials, Seed seed);

/// Gaussian Y with random ascending positive λ: ‖Y_{:,>n}‖₂ λ_{n+1} <=
/// ‖Y diag λ‖₂ (1 + 1e-12) for every n, all norms from full SVDs. worst is
/// the largest ratio of the two sides.
SuiteResult truncated_bound(std::size_t trials, Seed seed);

/// Generated δ-near-symmetric instances with δ < ε and a finite upper bound:
/// both extremal witnesses pass membership_check and
/// lower − 1e-9 <= ‖B₊ − B₋‖₂ <= upper + 1e-9. worst is the largest
/// violation of either inequality (0 when all hold).
SuiteResult witness_sandwich(std::size_t trials, Seed seed);

}  // namespace opfree::selfcheck
