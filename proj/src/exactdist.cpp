#include "maxid/exactdist.hpp"

#include <cmath>

#include "maxid/integrator.hpp"
#include <stdexcept>

namespace maxid {

namespace {

bool all_zero(const std::vector<double>& v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

}  // namespace

void FddQuery::validate_max() const {
  if (points.empty() || points.size() != thresholds.size())
    throw std::invalid_argument("fdd query: point/threshold size mismatch");
  for (double x : thresholds)
    if (!(x >= 0.0))
      throw std::invalid_argument("fdd query: thresholds must be >= 0");
  if (all_zero(thresholds))
    throw std::invalid_argument("fdd query: thresholds must not all be 0");
}

void FddQuery::validate_sum() const {
  if (points.empty() || points.size() != angles.size())
    throw std::invalid_argument("fdd query: point/angle size mismatch");
  if (!location_offsets.empty() && location_offsets.size() != points.size())
    throw std::invalid_argument("fdd query: offsets size mismatch");
}

FddResult fdd_cdf(const SpectralModel& model, const FddQuery& query,
                  const QuadratureSpec& quad) {
  query.validate_max();
  std::vector<VectorXd> ts;
  std::vector<double> xs;
  for (size_t j = 0; j < query.points.size(); ++j) {
    if (query.thresholds[j] == 0.0) return {0.0, 0.0};  // infinite mass
    if (std::isinf(query.thresholds[j])) continue;      // empty level set
    ts.push_back(query.points[j]);
    xs.push_back(query.thresholds[j]);
  }
  if (ts.empty()) return {1.0, 0.0};
  double err = 0.0;
  double mass = model.union_mass(ts, xs, quad, &err);
  double value = std::exp(-mass);
  return {value, value * err};
}

CharResult char_function(const SpectralModel& model, const FddQuery& query,
                         const QuadratureSpec& quad) {
  query.validate_sum();
  if (all_zero(query.angles)) return {std::complex<double>{1.0, 0.0}, 0.0};

  VectorXd lo = query.points.front(), hi = query.points.front();
  for (const VectorXd& t : query.points) {
    lo = lo.cwiseMin(t);
    hi = hi.cwiseMax(t);
  }
  Window w = model.window_for(lo, hi, 1e-6);
  double total = model.intensity().mass(w);

  Rng rng = Rng::derive(quad.seed, "char_function_mc");
  const int n = quad.mc_samples;
  std::complex<double> mean = 0.0;
  double sum_re2 = 0.0, sum_im2 = 0.0;
  for (int i = 0; i < n; ++i) {
    Atom atom;
    atom.loc.resize(w.dim());
    for (int c = 0; c < w.dim(); ++c)
      atom.loc[c] =
          model.intensity().axes[c].sample(w.lower[c], w.upper[c], rng);
    if (model.intensity().mark) {
      Rng mark_rng = Rng::derive(quad.seed, "char_function_mark", i);
      atom.mark = model.intensity().mark->draw(mark_rng);
    }
    double phase = 0.0, drift = 0.0;
    for (size_t j = 0; j < query.points.size(); ++j) {
      double f = model.eval(query.points[j], atom);
      phase += query.angles[j] * f;
      drift += query.angles[j] * compensator_a(f);
    }
    std::complex<double> s{std::cos(phase) - 1.0, std::sin(phase) - drift};
    mean += s;
    sum_re2 += s.real() * s.real();
    sum_im2 += s.imag() * s.imag();
  }
  mean /= static_cast<double>(n);
  double var_re = std::max(0.0, sum_re2 / n - mean.real() * mean.real());
  double var_im = std::max(0.0, sum_im2 / n - mean.imag() * mean.imag());
  double stderr_norm = std::sqrt((var_re + var_im) / n);

  std::complex<double> expo = total * mean;
  if (!query.location_offsets.empty()) {
    double shift = 0.0;
    for (size_t j = 0; j < query.points.size(); ++j)
      shift += query.angles[j] * query.location_offsets[j];
    expo += std::complex<double>{0.0, shift};
  }
  std::complex<double> value = std::exp(expo);
  return {value, std::abs(value) * total * stderr_norm};
}

}  // namespace maxid
