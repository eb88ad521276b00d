#include "maxid/point_process.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace maxid {

void TailTable::validate() const {
  if (x.size() != m.size() || x.size() < 2)
    throw std::invalid_argument("tail table: need >= 2 knots");
  for (size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1]))
      throw std::invalid_argument("tail table: knots must increase");
    if (m[i] > m[i - 1])
      throw std::invalid_argument("tail table: masses must not increase");
  }
  if (m.back() != 0.0)
    throw std::invalid_argument("tail table: final mass must be 0");
}

double TailTable::mass_above(double x0) const {
  if (x0 >= x.back()) return 0.0;
  if (x0 <= x.front()) return m.front();
  auto it = std::upper_bound(x.begin(), x.end(), x0);
  size_t i = static_cast<size_t>(it - x.begin());
  double w = (x0 - x[i - 1]) / (x[i] - x[i - 1]);
  return m[i - 1] + w * (m[i] - m[i - 1]);
}

double TailTable::inverse_mass(double m0) const {
  if (m0 <= 0.0) return x.back();
  if (m0 >= m.front()) return x.front();
  // m is nonincreasing; find the segment containing m0
  for (size_t i = 1; i < m.size(); ++i) {
    if (m[i] <= m0) {
      if (m[i - 1] == m[i]) return x[i];
      double w = (m[i - 1] - m0) / (m[i - 1] - m[i]);
      return x[i - 1] + w * (x[i] - x[i - 1]);
    }
  }
  return x.back();
}

double AxisLaw::mass(double lo, double hi) const {
  switch (kind) {
    case kLebesgue:
      if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::runtime_error("window has infinite intensity mass");
      return hi - lo;
    case kFrechetTail: {
      if (lo <= 0.0)
        throw std::runtime_error("window has infinite intensity mass");
      double m = std::pow(lo, -alpha);
      if (std::isfinite(hi)) m -= std::pow(hi, -alpha);
      return m;
    }
    case kTailTable:
      return table->mass_above(lo) -
             (std::isfinite(hi) ? table->mass_above(hi) : 0.0);
    case kWeightedDiscrete: {
      if (lo > 0.0 || hi < static_cast<double>(weights.size()) - 1.0)
        throw std::runtime_error(
            "discrete axis: window must cover the whole label range");
      double s = 0.0;
      for (double w : weights) s += w;
      return s;
    }
  }
  throw std::logic_error("unreachable");
}

double AxisLaw::sample(double lo, double hi, Rng& rng) const {
  switch (kind) {
    case kLebesgue:
      return rng.uniform(lo, hi);
    case kFrechetTail: {
      // Inverse transform of the normalized restriction of
      // alpha z^{-(alpha+1)} dz to [lo, hi].
      double mlo = std::pow(lo, -alpha);
      double mhi = std::isfinite(hi) ? std::pow(hi, -alpha) : 0.0;
      double u = rng.uniform();
      return std::pow(mlo - u * (mlo - mhi), -1.0 / alpha);
    }
    case kTailTable: {
      double mlo = table->mass_above(lo);
      double mhi = std::isfinite(hi) ? table->mass_above(hi) : 0.0;
      return table->inverse_mass(mhi + rng.uniform() * (mlo - mhi));
    }
    case kWeightedDiscrete: {
      double s = 0.0;
      for (double w : weights) s += w;
      double u = rng.uniform() * s;
      for (size_t j = 0; j < weights.size(); ++j) {
        u -= weights[j];
        if (u <= 0.0) return static_cast<double>(j);
      }
      return static_cast<double>(weights.size() - 1);
    }
  }
  throw std::logic_error("unreachable");
}

void Window::validate() const {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw std::invalid_argument("window: bound dimensions mismatch");
  for (int i = 0; i < dim(); ++i)
    if (!(lower[i] < upper[i]))
      throw std::invalid_argument("window: lower >= upper on axis " +
                                  std::to_string(i));
}

bool Window::contains(const VectorXd& x) const {
  if (x.size() != lower.size()) return false;
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  return true;
}

bool Window::same_as(const Window& other) const {
  return lower == other.lower && upper == other.upper &&
         mark_descriptor == other.mark_descriptor;
}

double IntensityMeasure::mass(const Window& w) const {
  w.validate();
  if (static_cast<int>(axes.size()) != w.dim())
    throw std::invalid_argument("intensity/window dimension mismatch");
  double m = lambda;
  for (int i = 0; i < w.dim(); ++i) m *= axes[i].mass(w.lower[i], w.upper[i]);
  if (!std::isfinite(m))
    throw std::runtime_error("window has infinite intensity mass");
  return m;
}

PointConfig sample_poisson(const IntensityMeasure& intensity, const Window& w,
                           std::uint64_t seed) {
  double m = intensity.mass(w);
  Rng rng = Rng::derive(seed, "sample_poisson");
  std::uint64_t n = rng.poisson(m);
  PointConfig out;
  out.window = w;
  out.seed = seed;
  out.atoms.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Atom a;
    a.loc.resize(w.dim());
    for (int j = 0; j < w.dim(); ++j)
      a.loc[j] = intensity.axes[j].sample(w.lower[j], w.upper[j], rng);
    if (intensity.mark) {
      Rng mark_rng = Rng::derive(seed, "mark", i);
      a.mark = intensity.mark->draw(mark_rng);
    }
    out.atoms.push_back(std::move(a));
  }
  return out;
}

PointConfig thin(const PointConfig& config, double keep_prob,
                 std::uint64_t seed) {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0))
    throw std::invalid_argument("thin: keep_prob must be in (0,1]");
  PointConfig out;
  out.window = config.window;
  out.seed = seed;
  Rng rng = Rng::derive(seed, "thin");
  for (const Atom& a : config.atoms)
    if (rng.uniform() < keep_prob) out.atoms.push_back(a);
  return out;
}

PointConfig thin_complement(const PointConfig& config, double keep_prob,
                            std::uint64_t seed) {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0))
    throw std::invalid_argument("thin: keep_prob must be in (0,1]");
  PointConfig out;
  out.window = config.window;
  out.seed = seed;
  Rng rng = Rng::derive(seed, "thin");
  for (const Atom& a : config.atoms)
    if (!(rng.uniform() < keep_prob)) out.atoms.push_back(a);
  return out;
}

PointConfig superpose(const std::vector<PointConfig>& configs) {
  if (configs.empty())
    throw std::invalid_argument("superpose: empty input has no window");
  PointConfig out;
  out.window = configs.front().window;
  out.seed = configs.front().seed;
  for (const PointConfig& c : configs) {
    if (!c.window.same_as(out.window))
      throw std::invalid_argument("superpose: mismatched windows");
    out.atoms.insert(out.atoms.end(), c.atoms.begin(), c.atoms.end());
  }
  return out;
}

std::string to_csv(const PointConfig& config) {
  std::ostringstream os;
  os.precision(17);
  for (const Atom& a : config.atoms) {
    for (int i = 0; i < a.loc.size(); ++i) {
      if (i) os << ',';
      os << a.loc[i];
    }
    for (int i = 0; i < a.mark.size(); ++i) os << ',' << a.mark[i];
    os << '\n';
  }
  return os.str();
}

std::string to_json(const PointConfig& config) {
  nlohmann::json j;
  j["schema"] = 1;
  j["seed"] = config.seed;
  j["window"] = {{"lower", std::vector<double>(config.window.lower.begin(),
                                               config.window.lower.end())},
                 {"upper", std::vector<double>(config.window.upper.begin(),
                                               config.window.upper.end())},
                 {"mark_descriptor", config.window.mark_descriptor}};
  auto& atoms = j["atoms"] = nlohmann::json::array();
  for (const Atom& a : config.atoms) {
    nlohmann::json ja;
    ja["loc"] = std::vector<double>(a.loc.begin(), a.loc.end());
    if (a.mark.size())
      ja["mark"] = std::vector<double>(a.mark.begin(), a.mark.end());
    atoms.push_back(std::move(ja));
  }
  return j.dump();
}

}  // namespace maxid
