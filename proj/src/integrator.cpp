#include "maxid/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maxid {

double compensator_a(double u) { return std::clamp(u, -1.0, 1.0); }

double max_integral(const SpectralModel& model, const VectorXd& t,
                    const PointConfig& config) {
  const bool min_kind = model.orientation() == Orientation::kMin;
  double acc =
      min_kind ? std::numeric_limits<double>::infinity() : 0.0;
  for (size_t i = 0; i < config.atoms.size(); ++i) {
    double v;
    try {
      v = model.eval(t, config.atoms[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("evaluation failed at atom " +
                               std::to_string(i) + ": " + e.what());
    }
    acc = min_kind ? std::min(acc, v) : std::max(acc, v);
  }
  return acc;
}

double TruncationCertificate::at(double a) const {
  if (thresholds.empty())
    throw std::invalid_argument("empty truncation certificate");
  // exceed prob is non-increasing in a: take the largest listed
  // threshold <= a (conservative for any a in between).
  auto it = std::upper_bound(thresholds.begin(), thresholds.end(), a);
  if (it == thresholds.begin())
    throw std::invalid_argument("threshold below certified range");
  return exceed_prob[it - thresholds.begin() - 1];
}

TruncationCertificate tail_certificate(const SpectralModel& model,
                                       const VectorXd& t, const Window& window,
                                       std::vector<double> thresholds) {
  std::sort(thresholds.begin(), thresholds.end());
  if (thresholds.empty() || thresholds.front() <= 0.0)
    throw std::invalid_argument("certificate thresholds must be positive");
  TruncationCertificate cert;
  cert.window = window;
  cert.envelope = model.tail_is_envelope();
  cert.thresholds = std::move(thresholds);
  cert.exceed_prob.reserve(cert.thresholds.size());
  for (double a : cert.thresholds)
    cert.exceed_prob.push_back(-std::expm1(-model.tail_mass(t, a, window)));
  for (size_t i = 1; i < cert.exceed_prob.size(); ++i)
    cert.exceed_prob[i] = std::min(cert.exceed_prob[i], cert.exceed_prob[i - 1]);
  return cert;
}

void SumIntegralPlan::validate() const {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("sum plan: epsilon must be positive");
  if (!std::isfinite(compensator_integral))
    throw std::invalid_argument("sum plan: compensator must be finite");
  if (!(remainder_variance_bound >= 0.0))
    throw std::invalid_argument("sum plan: negative remainder bound");
}

double sum_integral(const SpectralModel& model, const VectorXd& t,
                    const PointConfig& config, const SumIntegralPlan& plan) {
  plan.validate();
  double acc = 0.0;
  for (size_t i = 0; i < config.atoms.size(); ++i) {
    double v;
    try {
      v = model.eval(t, config.atoms[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("evaluation failed at atom " +
                               std::to_string(i) + ": " + e.what());
    }
    if (std::abs(v) > plan.epsilon) acc += v;
  }
  return acc - plan.compensator_integral;
}

// ---------------------------------------------------------------------------
// simple-function calculus

void StepFunction::validate() const {
  if (mass.size() != value.size() || mass.empty())
    throw std::invalid_argument("step function: bad cell layout");
  for (double m : mass)
    if (!(m > 0.0) || !std::isfinite(m))
      throw std::invalid_argument("step function: cell masses must be > 0");
}

double StepFunction::total_mass() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

void StepPair::validate() const {
  if (mass.empty() || mass.size() != f.size() || mass.size() != g.size())
    throw std::invalid_argument("step pair: bad cell layout");
  for (double m : mass)
    if (!(m > 0.0) || !std::isfinite(m))
      throw std::invalid_argument("step pair: cell masses must be > 0");
}

double gamma_defect(const StepPair& p) {
  p.validate();
  double acc = 0.0;
  for (size_t i = 0; i < p.mass.size(); ++i)
    acc += p.mass[i] * (compensator_a(p.f[i] + p.g[i]) -
                        compensator_a(p.f[i]) - compensator_a(p.g[i]));
  return acc;
}

double metric_d(const StepPair& p) {
  p.validate();
  double acc = 0.0;
  for (size_t i = 0; i < p.mass.size(); ++i) {
    double dfg = p.f[i] - p.g[i];
    acc += p.mass[i] * std::min(1.0, dfg * dfg);
  }
  return std::sqrt(acc);
}

double metric_d(const StepFunction& f) {
  f.validate();
  double acc = 0.0;
  for (size_t i = 0; i < f.mass.size(); ++i)
    acc += f.mass[i] * std::min(1.0, f.value[i] * f.value[i]);
  return std::sqrt(acc);
}

double metric_dmu(const StepPair& p) {
  p.validate();
  auto mass_at = [&](double eps) {
    double m = 0.0;
    for (size_t i = 0; i < p.mass.size(); ++i)
      if (std::abs(p.f[i] - p.g[i]) >= eps) m += p.mass[i];
    return m;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (mass_at(hi) > hi) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (mass_at(mid) > mid ? lo : hi) = mid;
  }
  return hi;
}

std::complex<double> step_char_function(const StepFunction& f, double theta) {
  f.validate();
  std::complex<double> expo = 0.0;
  for (size_t i = 0; i < f.mass.size(); ++i) {
    double v = f.value[i];
    std::complex<double> e{std::cos(theta * v) - 1.0, std::sin(theta * v)};
    expo += f.mass[i] * (e - std::complex<double>{0.0, theta *
                                                           compensator_a(v)});
  }
  return std::exp(expo);
}

double step_sum_integral_sample(const StepFunction& f, Rng& rng) {
  f.validate();
  double acc = 0.0;
  for (size_t i = 0; i < f.mass.size(); ++i) {
    long n = rng.poisson(f.mass[i]);
    acc += n * f.value[i] - f.mass[i] * compensator_a(f.value[i]);
  }
  return acc;
}

double ky_fan(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("ky_fan: paired nonempty samples required");
  const size_t n = x.size();
  std::vector<double> d(n);
  for (size_t i = 0; i < n; ++i) d[i] = std::abs(x[i] - y[i]);
  std::sort(d.begin(), d.end());
  auto exceed = [&](double delta) {
    // #{d_i >= delta} / n
    size_t k = std::lower_bound(d.begin(), d.end(), delta) - d.begin();
    return static_cast<double>(n - k) / n;
  };
  double lo = 0.0, hi = 1.0;
  if (d.back() == 0.0) return 0.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (exceed(mid) > mid ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace maxid
