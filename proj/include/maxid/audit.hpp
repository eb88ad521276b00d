#pragma once

#include <cstdint>
#include <vector>

#include "maxid/integrator.hpp"

namespace maxid {

// Randomized inequality suites over simple-function inputs.  A margin is
// (right side - left side) per trial; negative margins are violations.
struct AuditResult {
  int trials = 0;
  int violations = 0;
  std::vector<double> margins;
};

// |gamma(f,g)| <= 3 d(f+g)^2 + 2 (d(f) + d(g)) d(f+g) + 1e-9.
AuditResult audit_gamma_bound(int trials, std::uint64_t seed);

// Empirical Ky Fan distance of I(f) to 0 <= 2 d(f)^{2/3} + 3 MC se.
AuditResult audit_kyfan_upper(int trials, int replicates, std::uint64_t seed);

// 1 - exp(-(1 - sin 1) d(f)^2) <= 2 d_KF(I(f) - I(f)') + 3 MC se.
AuditResult audit_kyfan_lower(int trials, int replicates, std::uint64_t seed);

}  // namespace maxid
