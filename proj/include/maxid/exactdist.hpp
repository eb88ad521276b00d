#pragma once

#include <complex>
#include <vector>

#include "maxid/spectral.hpp"

namespace maxid {

// Probe points for joint-distribution checks: thresholds x_j for the
// max-i.d. CDF, angles theta_j for the i.d. characteristic function.
struct FddQuery {
  std::vector<VectorXd> points;
  std::vector<double> thresholds;        // max case, >= 0, not all 0
  std::vector<double> angles;            // sum case
  std::vector<double> location_offsets;  // optional c(t), sum case

  void validate_max() const;
  void validate_sum() const;
};

struct FddResult {
  double value = 0.0;
  double error = 0.0;  // propagated union-mass error
};

// P[X(t_j) < x_j for all j] = exp(-mu(union_j {f_{t_j} >= x_j})).
FddResult fdd_cdf(const SpectralModel& model, const FddQuery& query,
                  const QuadratureSpec& quad);

struct CharResult {
  std::complex<double> value{1.0, 0.0};
  double error = 0.0;
};

// exp{int (e^{i sum theta_j f_j} - 1 - i sum theta_j a(f_j)) dmu}
// (+ i sum theta_j c(t_j) when offsets are given), by Monte Carlo over a
// dominating window of mu.
CharResult char_function(const SpectralModel& model, const FddQuery& query,
                         const QuadratureSpec& quad);

}  // namespace maxid
