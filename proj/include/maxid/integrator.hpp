#pragma once

#include <complex>
#include <vector>

#include "maxid/spectral.hpp"

namespace maxid {

// Centering function a(u) of the compensated sum-integral.
double compensator_a(double u);

// sup over atoms of f_t (0 when empty); min-oriented models take the inf
// instead (+inf when empty).
double max_integral(const SpectralModel& model, const VectorXd& t,
                    const PointConfig& config);

// P[sup over atoms outside `window` >= a] = 1 - exp(-tail_mass(a)).
struct TruncationCertificate {
  std::vector<double> thresholds;   // increasing
  std::vector<double> exceed_prob;  // non-increasing
  bool envelope = false;            // true: upper bounds, not exact
  Window window;

  double at(double a) const;  // conservative lookup for a >= thresholds[0]
};

TruncationCertificate tail_certificate(const SpectralModel& model,
                                       const VectorXd& t, const Window& window,
                                       std::vector<double> thresholds);

// Small-jump truncation of the compensated sum-integral at level epsilon.
struct SumIntegralPlan {
  double epsilon = 0.0;
  double compensator_integral = 0.0;     // int_{|f|>eps} a(f) dmu
  double remainder_variance_bound = 0.0; // bound on int_{|f|<=eps} f^2 dmu

  void validate() const;
};

double sum_integral(const SpectralModel& model, const VectorXd& t,
                    const PointConfig& config, const SumIntegralPlan& plan);

// --- exact calculus on simple functions ------------------------------------
// A simple function over finitely many disjoint cells of finite mass; all
// metric identities below are closed-form in this class.

struct StepFunction {
  std::vector<double> mass;   // mu(cell_i) > 0
  std::vector<double> value;  // f on cell_i

  void validate() const;
  double total_mass() const;
};

// A pair on a shared cell partition.
struct StepPair {
  std::vector<double> mass;
  std::vector<double> f;
  std::vector<double> g;

  void validate() const;
};

// gamma(f,g) = int (a(f+g) - a(f) - a(g)) dmu.
double gamma_defect(const StepPair& p);

// d(f,g) = (int 1 ^ (f-g)^2 dmu)^{1/2}.
double metric_d(const StepPair& p);
double metric_d(const StepFunction& f);  // d(f, 0)

// d_mu(f,g) = inf{eps > 0 : mu(|f-g| >= eps) <= eps}, by bisection.
double metric_dmu(const StepPair& p);

// Characteristic function of I(f): exp{sum_i m_i (e^{i th v_i} - 1 - i th a(v_i))}.
std::complex<double> step_char_function(const StepFunction& f, double theta);

// One draw of I(f) = sum over Poisson(m_i) atoms of v_i, minus the
// compensator sum_i m_i a(v_i).  Exact in law (cells are disjoint).
double step_sum_integral_sample(const StepFunction& f, Rng& rng);

// Empirical Ky Fan distance of paired samples:
// inf{delta : #{|x_i - y_i| >= delta}/n <= delta}.
double ky_fan(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace maxid
