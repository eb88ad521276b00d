#include "maxid/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace maxid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Atom sample_atom(const IntensityMeasure& intensity, const Window& w,
                 Rng& rng) {
  Atom a;
  a.loc.resize(w.dim());
  for (int j = 0; j < w.dim(); ++j)
    a.loc[j] = intensity.axes[j].sample(w.lower[j], w.upper[j], rng);
  if (intensity.mark) a.mark = intensity.mark->draw(rng);
  return a;
}

VectorXd uniform_in_ball(int k, double radius, Rng& rng) {
  VectorXd dir(k);
  for (int i = 0; i < k; ++i) dir[i] = rng.normal();
  double n = dir.norm();
  if (n == 0.0) return VectorXd::Zero(k);
  return dir * (radius * std::pow(rng.uniform(), 1.0 / k) / n);
}

}  // namespace

// ---------------------------------------------------------------------------
// SpectralModel base

double SpectralModel::level_mass(const VectorXd&, double) const {
  throw std::runtime_error("tail mass unavailable for model " + kind());
}

double SpectralModel::tail_mass(const VectorXd&, double,
                                const Window&) const {
  throw std::runtime_error("tail mass unavailable for model " + kind());
}

Atom SpectralModel::shift_atom(const Atom&, const VectorXd&) const {
  throw std::runtime_error("model " + kind() + " has no shift action");
}

double SpectralModel::core_mass() const {
  throw std::runtime_error("model " + kind() + " declares no core");
}

std::function<double(const VectorXd&)> SpectralModel::sample_core_trajectory(
    Rng&, const std::vector<VectorXd>&) const {
  throw std::runtime_error("model " + kind() + " declares no core");
}

PsiSpec SpectralModel::alternate_psi() const {
  return PsiSpec{PsiSpec::kInvExp};
}

double SpectralModel::margin_cdf(const VectorXd& t, double x) const {
  if (!(x > 0.0)) return 0.0;
  return std::exp(-level_mass(t, x));
}

double SpectralModel::margin_quantile(const VectorXd& t, double p) const {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("margin_quantile: p must be in (0,1)");
  double hi = 1.0;
  for (int i = 0; i < 200 && margin_cdf(t, hi) < p; ++i) hi *= 2.0;
  double lo = hi;
  for (int i = 0; i < 400 && margin_cdf(t, lo) > p; ++i) lo *= 0.5;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (margin_cdf(t, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double SpectralModel::union_mass(const std::vector<VectorXd>& ts,
                                 const std::vector<double>& xs,
                                 const QuadratureSpec& quad,
                                 double* std_error) const {
  if (ts.empty() || ts.size() != xs.size())
    throw std::invalid_argument("union_mass: point/threshold size mismatch");
  // Dominating window: small enough budget that every level set
  // {f_{t_j} >= x_j} is contained in it.
  VectorXd lo = ts.front(), hi = ts.front();
  double budget = 1.0;
  for (size_t j = 0; j < ts.size(); ++j) {
    lo = lo.cwiseMin(ts[j]);
    hi = hi.cwiseMax(ts[j]);
    budget = std::min(budget, 0.5 * margin_cdf(ts[j], xs[j]));
  }
  budget = std::max(budget, 1e-300);
  Window w = window_for(lo, hi, budget);
  double total = intensity().mass(w);
  Rng rng = Rng::derive(quad.seed, "union_mass_mc");
  long hits = 0;
  const int n = quad.mc_samples;
  for (int i = 0; i < n; ++i) {
    Atom a = sample_atom(intensity(), w, rng);
    for (size_t j = 0; j < ts.size(); ++j)
      if (eval(ts[j], a) >= xs[j]) {
        ++hits;
        break;
      }
  }
  double p = static_cast<double>(hits) / n;
  if (std_error) *std_error = total * std::sqrt(p * (1.0 - p) / n);
  return total * p;
}

// ---------------------------------------------------------------------------
// GrainSet

void GrainSet::validate() const {
  if (shape == kBox) {
    if (half_widths.size() != dim)
      throw std::invalid_argument("grain: half_widths size != dim");
    for (int i = 0; i < dim; ++i)
      if (!(half_widths[i] > 0.0))
        throw std::invalid_argument("grain: half widths must be positive");
  } else {
    if (!(radius > 0.0))
      throw std::invalid_argument("grain: radius must be positive");
  }
}

double GrainSet::measure() const {
  if (shape == kBox) {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= 2.0 * half_widths[i];
    return v;
  }
  return ball_volume(dim, radius);
}

bool GrainSet::contains(const VectorXd& x) const {
  if (x.size() != dim) return false;
  if (shape == kBox) {
    for (int i = 0; i < dim; ++i)
      if (std::abs(x[i]) > half_widths[i]) return false;
    return true;
  }
  return x.norm() <= radius;
}

double GrainSet::circumradius() const {
  return shape == kBox ? half_widths.norm() : radius;
}

// ---------------------------------------------------------------------------
// Mixed moving maxima: f_t(u, v) = F(|t - u|), intensity lambda du dv.

class MovingMaximaModel final : public SpectralModel {
 public:
  MovingMaximaModel(const StormProfile& storm, double lambda, int d)
      : storm_(storm), d_(d) {
    storm_.validate();
    if (d < 1) throw std::invalid_argument("moving_maxima: d must be >= 1");
    if (!(lambda > 0.0))
      throw std::invalid_argument("moving_maxima: lambda must be positive");
    intensity_.lambda = lambda;
    intensity_.axes.assign(static_cast<size_t>(d) + 1, AxisLaw{});
  }

  std::string kind() const override { return "moving_maxima"; }
  int index_dim() const override { return d_; }

  double eval(const VectorXd& t, const Atom& atom) const override {
    return storm_.eval((t - atom.loc.head(d_)).norm());
  }

  double level_mass(const VectorXd&, double a) const override {
    return intensity_.lambda * ball_volume(d_, storm_.level_radius(a));
  }

  Window window_for(const VectorXd& t_lo, const VectorXd& t_hi,
                    double budget) const override {
    double xb = margin_quantile(t_lo, budget);
    double w = storm_.level_radius(xb);
    Window win;
    win.lower.resize(d_ + 1);
    win.upper.resize(d_ + 1);
    win.lower.head(d_) = t_lo.array() - w;
    win.upper.head(d_) = t_hi.array() + w;
    win.lower[d_] = 0.0;
    win.upper[d_] = 1.0;
    win.mark_descriptor = "uniform[0,1]";
    return win;
  }

  double tail_mass(const VectorXd& t, double a,
                   const Window& w) const override {
    double r = storm_.level_radius(a);
    if (r == 0.0) return 0.0;
    if (d_ == 1) {
      double lo = t[0] - r, hi = t[0] + r;
      double olap = std::max(
          0.0, std::min(hi, w.upper[0]) - std::max(lo, w.lower[0]));
      return intensity_.lambda * ((hi - lo) - olap);
    }
    // envelope for d > 1: zero when the level ball is inside the box
    bool inside = true;
    for (int i = 0; i < d_; ++i)
      inside = inside && t[i] - r >= w.lower[i] && t[i] + r <= w.upper[i];
    return inside ? 0.0 : intensity_.lambda * ball_volume(d_, r);
  }
  bool tail_is_envelope() const override { return d_ > 1; }

  double union_mass(const std::vector<VectorXd>& ts,
                    const std::vector<double>& xs, const QuadratureSpec& quad,
                    double* std_error) const override {
    if (d_ != 1)
      return SpectralModel::union_mass(ts, xs, quad, std_error);
    std::vector<std::pair<double, double>> iv;
    for (size_t j = 0; j < ts.size(); ++j) {
      double r = storm_.level_radius(xs[j]);
      if (r > 0.0) iv.emplace_back(ts[j][0] - r, ts[j][0] + r);
    }
    if (std_error) *std_error = 0.0;
    return intensity_.lambda * interval_union_measure(std::move(iv));
  }

  Atom shift_atom(const Atom& atom, const VectorXd& s) const override {
    Atom out = atom;
    out.loc.head(d_) -= s;
    return out;
  }

  double core_mass() const override {
    return intensity_.lambda *
           ball_volume(d_, storm_.level_radius(0.5 * storm_.max_height()));
  }

  std::function<double(const VectorXd&)> sample_core_trajectory(
      Rng& rng, const std::vector<VectorXd>&) const override {
    double r0 = storm_.level_radius(0.5 * storm_.max_height());
    VectorXd u = uniform_in_ball(d_, r0, rng);
    StormProfile storm = storm_;
    return [storm, u](const VectorXd& t) {
      return storm.eval((t - u).norm());
    };
  }

 private:
  StormProfile storm_;
  int d_;
};

// ---------------------------------------------------------------------------
// Poisson line storms: f_{(x,y)}(r, phi, v) = F(x cos phi + y sin phi - r),
// intensity lambda dr dphi dv.

class PoissonLineModel : public SpectralModel {
 public:
  PoissonLineModel(const StormProfile& storm, double lambda) : storm_(storm) {
    storm_.validate();
    if (!(lambda > 0.0))
      throw std::invalid_argument("poisson_line: lambda must be positive");
    intensity_.lambda = lambda;
    intensity_.axes.assign(3, AxisLaw{});
  }

  std::string kind() const override { return "poisson_line"; }
  int index_dim() const override { return 2; }

  double eval(const VectorXd& t, const Atom& atom) const override {
    double proj = t[0] * std::cos(atom.loc[1]) + t[1] * std::sin(atom.loc[1]);
    return storm_.eval(proj - atom.loc[0]);
  }

  double level_mass(const VectorXd&, double a) const override {
    return intensity_.lambda * kTwoPi * 2.0 * storm_.level_radius(a);
  }

  Window window_for(const VectorXd& t_lo, const VectorXd& t_hi,
                    double budget) const override {
    double xb = margin_quantile(t_lo, budget);
    double reach = std::max(t_lo.norm(), t_hi.norm());
    double rmax = reach + storm_.level_radius(xb);
    Window win;
    win.lower.resize(3);
    win.upper.resize(3);
    win.lower << -rmax, 0.0, 0.0;
    win.upper << rmax, kTwoPi, 1.0;
    win.mark_descriptor = "uniform[0,1]";
    return win;
  }

  double tail_mass(const VectorXd& t, double a,
                   const Window& w) const override {
    double rl = storm_.level_radius(a);
    if (rl == 0.0) return 0.0;
    const int n = 512;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double phi = kTwoPi * (i + 0.5) / n;
      double proj = t[0] * std::cos(phi) + t[1] * std::sin(phi);
      double lo = proj - rl, hi = proj + rl;
      double olap = std::max(
          0.0, std::min(hi, w.upper[0]) - std::max(lo, w.lower[0]));
      acc += (hi - lo) - olap;
    }
    return intensity_.lambda * kTwoPi * acc / n;
  }

  double union_mass(const std::vector<VectorXd>& ts,
                    const std::vector<double>& xs, const QuadratureSpec&,
                    double* std_error) const override {
    auto integrate = [&](int n) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        double phi = kTwoPi * (i + 0.5) / n;
        std::vector<std::pair<double, double>> iv;
        for (size_t j = 0; j < ts.size(); ++j) {
          double r = storm_.level_radius(xs[j]);
          if (r > 0.0) {
            double proj =
                ts[j][0] * std::cos(phi) + ts[j][1] * std::sin(phi);
            iv.emplace_back(proj - r, proj + r);
          }
        }
        acc += interval_union_measure(std::move(iv));
      }
      return intensity_.lambda * kTwoPi * acc / n;
    };
    double coarse = integrate(512), fine = integrate(1024);
    if (std_error) *std_error = std::abs(fine - coarse);
    return fine;
  }

  Atom shift_atom(const Atom& atom, const VectorXd& s) const override {
    Atom out = atom;
    out.loc[0] -= s[0] * std::cos(atom.loc[1]) + s[1] * std::sin(atom.loc[1]);
    return out;
  }

  double core_mass() const override {
    return intensity_.lambda * kTwoPi * 2.0 *
           storm_.level_radius(0.5 * storm_.max_height());
  }

  std::function<double(const VectorXd&)> sample_core_trajectory(
      Rng& rng, const std::vector<VectorXd>&) const override {
    double r0 = storm_.level_radius(0.5 * storm_.max_height());
    double r = rng.uniform(-r0, r0);
    double phi = rng.uniform(0.0, kTwoPi);
    StormProfile storm = storm_;
    return [storm, r, phi](const VectorXd& t) {
      return storm.eval(t[0] * std::cos(phi) + t[1] * std::sin(phi) - r);
    };
  }

 protected:
  StormProfile storm_;
};

// ---------------------------------------------------------------------------
// Max-stable Poisson line storms: f = z F(proj - r), intensity
// lambda dr dphi alpha z^{-(alpha+1)} dz.

class PoissonLineMaxStableModel final : public SpectralModel {
 public:
  PoissonLineMaxStableModel(const StormProfile& storm, double lambda,
                            double alpha)
      : storm_(storm), alpha_(alpha) {
    storm_.validate();
    if (!(lambda > 0.0) || !(alpha > 0.0))
      throw std::invalid_argument(
          "poisson_line_maxstable: lambda and alpha must be positive");
    double ia = storm_.alpha_integral(alpha);
    if (!std::isfinite(ia) || !(ia > 0.0))
      throw std::invalid_argument(
          "poisson_line_maxstable: divergent alpha-integral of the storm");
    sigma_alpha_ = lambda * kTwoPi * ia;
    intensity_.lambda = lambda;
    intensity_.axes.assign(3, AxisLaw{});
    intensity_.axes[2].kind = AxisLaw::kFrechetTail;
    intensity_.axes[2].alpha = alpha;
  }

  std::string kind() const override { return "poisson_line_maxstable"; }
  int index_dim() const override { return 2; }

  double scale_sigma() const { return std::pow(sigma_alpha_, 1.0 / alpha_); }

  double eval(const VectorXd& t, const Atom& atom) const override {
    double proj = t[0] * std::cos(atom.loc[1]) + t[1] * std::sin(atom.loc[1]);
    return atom.loc[2] * storm_.eval(proj - atom.loc[0]);
  }

  double level_mass(const VectorXd&, double x) const override {
    return sigma_alpha_ * std::pow(x, -alpha_);
  }

  Window window_for(const VectorXd& t_lo, const VectorXd& t_hi,
                    double budget) const override {
    // xb: budget-quantile of the alpha-Frechet margin
    double xb = scale_sigma() * std::pow(std::log(1.0 / budget), -1.0 / alpha_);
    double zmin = xb / storm_.max_height();
    double reach = std::max(t_lo.norm(), t_hi.norm());
    // r-extent: off-window tail mass at threshold xb below budget/2
    double lo = 0.0, hi = storm_.level_radius(xb * 1e-12 / zmin) + 1.0;
    auto tail = [&](double r) {
      return intensity_.lambda * kTwoPi * std::pow(xb, -alpha_) *
             storm_.alpha_tail_integral(alpha_, r);
    };
    while (tail(hi) > 0.5 * budget) hi *= 2.0;
    for (int i = 0; i < 100; ++i) {
      double mid = 0.5 * (lo + hi);
      (tail(mid) > 0.5 * budget ? lo : hi) = mid;
    }
    double rmax = reach + hi;
    Window win;
    win.lower.resize(3);
    win.upper.resize(3);
    win.lower << -rmax, 0.0, zmin;
    win.upper << rmax, kTwoPi,
        std::numeric_limits<double>::infinity();
    win.mark_descriptor = "frechet(" + std::to_string(alpha_) + ")";
    return win;
  }

  double tail_mass(const VectorXd& t, double a,
                   const Window& w) const override {
    // {z F >= a} outside the window: |r| beyond the box, plus z below zmin.
    double reach = t.norm();
    double beyond = std::max(0.0, -w.lower[0] - reach);
    double part_r = intensity_.lambda * kTwoPi * std::pow(a, -alpha_) *
                    storm_.alpha_tail_integral(alpha_, beyond);
    double zmin = w.lower[2];
    // grid in r for the z-truncation part
    double L = storm_.level_radius(
        std::min(storm_.max_height(), a / zmin * 1e-9));
    double part_z = 0.0;
    const int n = 4096;
    if (L > 0.0) {
      for (int i = 0; i < n; ++i) {
        double r = -L + 2.0 * L * (i + 0.5) / n;
        double f = storm_.eval(r);
        if (f * zmin > a) continue;  // captured inside the window
        if (f <= 0.0) continue;
        double m = std::pow(a / f, -alpha_) - std::pow(zmin, -alpha_);
        if (m > 0.0) part_z += m;
      }
      part_z *= intensity_.lambda * kTwoPi * 2.0 * L / n;
    }
    return part_r + part_z;
  }
  bool tail_is_envelope() const override { return true; }

  double union_mass(const std::vector<VectorXd>& ts,
                    const std::vector<double>& xs, const QuadratureSpec& quad,
                    double* std_error) const override {
    if (ts.size() == 1) {
      if (std_error) *std_error = 0.0;
      return level_mass(ts[0], xs[0]);
    }
    return SpectralModel::union_mass(ts, xs, quad, std_error);
  }

  Atom shift_atom(const Atom& atom, const VectorXd& s) const override {
    Atom out = atom;
    out.loc[0] -= s[0] * std::cos(atom.loc[1]) + s[1] * std::sin(atom.loc[1]);
    return out;
  }

  double core_mass() const override {
    return sigma_alpha_;  // mass of {f_0 >= 1}
  }

  std::function<double(const VectorXd&)> sample_core_trajectory(
      Rng& rng, const std::vector<VectorXd>&) const override {
    // density over r proportional to F(-r)^alpha on the core {z F(-r) >= 1}
    double h = storm_.max_height();
    double L = storm_.level_radius(h * 1e-12);
    double r = 0.0;
    for (int tries = 0; tries < 100000; ++tries) {
      r = rng.uniform(-L, L);
      double f = storm_.eval(r);
      if (rng.uniform() < std::pow(f / h, alpha_)) break;
    }
    double phi = rng.uniform(0.0, kTwoPi);
    double z = (1.0 / storm_.eval(r)) *
               std::pow(rng.uniform(), -1.0 / alpha_);
    StormProfile storm = storm_;
    return [storm, r, phi, z](const VectorXd& t) {
      return z *
             storm.eval(t[0] * std::cos(phi) + t[1] * std::sin(phi) - r);
    };
  }

 private:
  StormProfile storm_;
  double alpha_;
  double sigma_alpha_;  // sigma^alpha of the margin
};

// ---------------------------------------------------------------------------
// Penrose min-i.d. fields: X(t) = min_i |U_i + xi_i(t)| on a fixed grid.

class PenroseModel final : public SpectralModel {
 public:
  PenroseModel(const PenroseSpec& spec, std::vector<VectorXd> grid)
      : spec_(spec), grid_(std::move(grid)) {
    if (grid_.empty()) throw std::invalid_argument("penrose: empty grid");
    if (spec_.storm_kind == PenroseSpec::kBrownian) {
      if (spec_.k < 1) throw std::invalid_argument("penrose: k must be >= 1");
      times_.reserve(grid_.size());
      for (const VectorXd& t : grid_) {
        if (t.size() != 1)
          throw std::invalid_argument("penrose: Brownian storms need 1-D t");
        times_.push_back(t[0]);
      }
      if (!std::is_sorted(times_.begin(), times_.end()))
        throw std::invalid_argument("penrose: grid must be sorted");
    } else {
      spec_.fbm.validate();
      spec_.k = 1;
      std::vector<Vector2d> nodes;
      nodes.reserve(grid_.size());
      for (const VectorXd& t : grid_) {
        if (t.size() != 2)
          throw std::invalid_argument("penrose: fbm storms need 2-D t");
        nodes.emplace_back(t[0], t[1]);
      }
      fbm_ = std::make_shared<FbmFieldSampler>(spec_.fbm, std::move(nodes),
                                               spec_.fbm_node_guard);
    }
    if (!(spec_.lambda > 0.0))
      throw std::invalid_argument("penrose: lambda must be positive");
    for (size_t i = 0; i < grid_.size(); ++i)
      node_of_.emplace(node_key(grid_[i]), static_cast<int>(i));
    intensity_.lambda = spec_.lambda;
    intensity_.axes.assign(static_cast<size_t>(spec_.k), AxisLaw{});
    auto mark = std::make_shared<MarkSampler>();
    mark->name = spec_.storm_kind == PenroseSpec::kBrownian
                     ? "brownian-path"
                     : "fbm-field";
    if (spec_.storm_kind == PenroseSpec::kBrownian) {
      int k = spec_.k;
      auto times = times_;
      mark->draw = [k, times](Rng& rng) {
        MatrixXd v = brownian_values(k, times, rng);
        return VectorXd(
            Eigen::Map<VectorXd>(v.data(), v.size()));  // column-major flat
      };
    } else {
      auto fbm = fbm_;
      mark->draw = [fbm](Rng& rng) { return fbm->draw_values(rng); };
    }
    intensity_.mark = std::move(mark);
  }

  std::string kind() const override { return "penrose"; }
  int index_dim() const override {
    return spec_.storm_kind == PenroseSpec::kBrownian ? 1 : 2;
  }
  Orientation orientation() const override { return Orientation::kMin; }

  static std::uint64_t node_key(const VectorXd& t) {
    auto q = [](double v) {
      return static_cast<std::uint32_t>(
          static_cast<std::int32_t>(std::llround(v * 1e6)));
    };
    std::uint64_t hi = q(t[0]);
    std::uint64_t lo = t.size() > 1 ? q(t[1]) : 0;
    return (hi << 32) | lo;
  }

  int node_index(const VectorXd& t) const {
    auto it = node_of_.find(node_key(t));
    if (it == node_of_.end())
      throw std::runtime_error("penrose: index point not on the model grid");
    return it->second;
  }

  // |U + xi(t)|; combine with min across atoms.
  double eval(const VectorXd& t, const Atom& atom) const override {
    int i = node_index(t);
    int k = spec_.k;
    int n = static_cast<int>(grid_.size());
    VectorXd x = atom.loc;
    for (int c = 0; c < k; ++c) {
      double v = atom.mark[c * n + i];  // column-major flat layout
      if (std::isnan(v))
        throw std::runtime_error("penrose: storm path undefined at node");
      x[c] += v;
    }
    return x.norm();
  }

  double displacement_envelope() const {
    double tmax = 0.0;
    for (const VectorXd& t : grid_) tmax = std::max(tmax, t.norm());
    if (spec_.storm_kind == PenroseSpec::kBrownian)
      return 3.0 * std::sqrt(static_cast<double>(spec_.k) * tmax);
    return 3.0 * std::sqrt(spec_.fbm.sigma2) *
           std::pow(tmax, spec_.fbm.hurst);
  }

  Window window_for(const VectorXd&, const VectorXd&,
                    double budget) const override {
    int k = spec_.k;
    double rq = std::pow(std::log(2.0 / budget) /
                             (spec_.lambda * ball_volume(k, 1.0)),
                         1.0 / k);
    double umax = rq + 2.0 * displacement_envelope();
    Window win;
    win.lower = VectorXd::Constant(k, -umax);
    win.upper = VectorXd::Constant(k, umax);
    win.mark_descriptor = intensity_.mark->name;
    return win;
  }

  Atom shift_atom(const Atom& atom, const VectorXd& s) const override {
    if (spec_.storm_kind != PenroseSpec::kBrownian)
      throw std::runtime_error("penrose: shift only for Brownian storms");
    int i0 = node_index(VectorXd::Zero(1));
    int is = node_index(s);
    int off = is - i0;
    int k = spec_.k;
    int n = static_cast<int>(grid_.size());
    Atom out = atom;
    // T_s(u, xi) = (u + xi(s), xi(s + .) - xi(s))
    for (int c = 0; c < k; ++c) out.loc[c] += atom.mark[c * n + is];
    out.mark = VectorXd::Constant(atom.mark.size(),
                                  std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < n; ++i) {
      int j = i + off;
      if (j < 0 || j >= n) continue;
      for (int c = 0; c < k; ++c)
        out.mark[c * n + i] = atom.mark[c * n + j] - atom.mark[c * n + is];
    }
    return out;
  }

  double core_mass() const override {
    return spec_.lambda * ball_volume(spec_.k, kCoreRadius);
  }

  std::function<double(const VectorXd&)> sample_core_trajectory(
      Rng& rng, const std::vector<VectorXd>& tgrid) const override {
    if (spec_.storm_kind != PenroseSpec::kBrownian)
      throw std::runtime_error(
          "penrose: flow classification needs Brownian storms");
    VectorXd u = uniform_in_ball(spec_.k, kCoreRadius, rng);
    std::vector<double> times;
    times.reserve(tgrid.size() + 1);
    for (const VectorXd& t : tgrid) times.push_back(t[0]);
    // the Brownian anchor B(0) = 0 need not be a query point
    auto it0 = std::lower_bound(times.begin(), times.end(), 0.0);
    if (it0 == times.end() || *it0 != 0.0) times.insert(it0, 0.0);
    MatrixXd path = brownian_values(spec_.k, times, rng);
    auto times_ptr = std::make_shared<std::vector<double>>(std::move(times));
    auto path_ptr = std::make_shared<MatrixXd>(std::move(path));
    return [u, times_ptr, path_ptr](const VectorXd& t) {
      auto it = std::lower_bound(times_ptr->begin(), times_ptr->end(),
                                 t[0] - 1e-12);
      if (it == times_ptr->end() || std::abs(*it - t[0]) > 1e-9)
        throw std::runtime_error("penrose: trajectory time off grid");
      Eigen::Index i = it - times_ptr->begin();
      return (u.transpose() + path_ptr->row(i)).norm();
    };
  }

  // exp(-beta x) with beta normalized so the admissibility integral
  // matches the 1-d unit-rate case: int_{R^k} psi(|u|) du = 2.
  PsiSpec default_psi() const override {
    int k = spec_.k;
    double surface = k * ball_volume(k, 1.0);
    double beta = std::pow(surface * std::tgamma(k) / 2.0, 1.0 / k);
    return PsiSpec{PsiSpec::kExpDecay, beta};
  }

  PsiSpec alternate_psi() const override {
    // Gaussian shape with the same admissibility normalization.
    int k = spec_.k;
    double surface = k * ball_volume(k, 1.0);
    // int surface r^{k-1} exp(-g r^2) dr = surface Gamma(k/2) / (2 g^{k/2})
    double gamma =
        std::pow(surface * std::tgamma(0.5 * k) / 4.0, 2.0 / k);
    return PsiSpec{PsiSpec::kGaussDecay, gamma};
  }

  static constexpr double kCoreRadius = 0.25;

 private:
  PenroseSpec spec_;
  std::vector<VectorXd> grid_;
  std::vector<double> times_;
  std::shared_ptr<FbmFieldSampler> fbm_;
  std::unordered_map<std::uint64_t, int> node_of_;
};

// ---------------------------------------------------------------------------
// Boolean model: f_t(u) = 1{u in t + A}.

class BooleanModel final : public SpectralModel {
 public:
  BooleanModel(const GrainSet& grain, double lambda, int d)
      : grain_(grain), d_(d) {
    grain_.dim = d;
    grain_.validate();
    if (!(lambda > 0.0))
      throw std::invalid_argument("boolean: lambda must be positive");
    intensity_.lambda = lambda;
    intensity_.axes.assign(static_cast<size_t>(d), AxisLaw{});
  }

  std::string kind() const override { return "boolean_set"; }
  int index_dim() const override { return d_; }

  double eval(const VectorXd& t, const Atom& atom) const override {
    return grain_.contains(atom.loc - t) ? 1.0 : 0.0;
  }

  double level_mass(const VectorXd&, double a) const override {
    return a <= 1.0 ? intensity_.lambda * grain_.measure() : 0.0;
  }

  Window window_for(const VectorXd& t_lo, const VectorXd& t_hi,
                    double) const override {
    double cr = grain_.circumradius();
    Window win;
    win.lower = t_lo.array() - cr;
    win.upper = t_hi.array() + cr;
    win.mark_descriptor = "none";
    return win;
  }

  double tail_mass(const VectorXd& t, double a,
                   const Window& w) const override {
    if (a > 1.0) return 0.0;
    double cr = grain_.circumradius();
    bool inside = true;
    for (int i = 0; i < d_; ++i)
      inside = inside && t[i] - cr >= w.lower[i] && t[i] + cr <= w.upper[i];
    return inside ? 0.0 : intensity_.lambda * grain_.measure();
  }

  double union_mass(const std::vector<VectorXd>& ts,
                    const std::vector<double>& xs, const QuadratureSpec& quad,
                    double* std_error) const override {
    std::vector<VectorXd> active;
    for (size_t j = 0; j < ts.size(); ++j)
      if (xs[j] <= 1.0) active.push_back(ts[j]);
    if (active.empty()) {
      if (std_error) *std_error = 0.0;
      return 0.0;
    }
    if (active.size() == 1) {
      if (std_error) *std_error = 0.0;
      return intensity_.lambda * grain_.measure();
    }
    // MC over the covering box of the active translated grains
    VectorXd lo = active.front(), hi = active.front();
    for (const VectorXd& t : active) {
      lo = lo.cwiseMin(t);
      hi = hi.cwiseMax(t);
    }
    double cr = grain_.circumradius();
    lo.array() -= cr;
    hi.array() += cr;
    double vol = (hi - lo).prod();
    Rng rng = Rng::derive(quad.seed, "boolean_union_mc");
    long hits = 0;
    const int n = quad.mc_samples;
    VectorXd u(d_);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < d_; ++c) u[c] = rng.uniform(lo[c], hi[c]);
      for (const VectorXd& t : active)
        if (grain_.contains(u - t)) {
          ++hits;
          break;
        }
    }
    double p = static_cast<double>(hits) / n;
    if (std_error)
      *std_error =
          intensity_.lambda * vol * std::sqrt(p * (1.0 - p) / n);
    return intensity_.lambda * vol * p;
  }

  Atom shift_atom(const Atom& atom, const VectorXd& s) const override {
    Atom out = atom;
    out.loc -= s;
    return out;
  }

  double core_mass() const override {
    return intensity_.lambda * grain_.measure();
  }

  std::function<double(const VectorXd&)> sample_core_trajectory(
      Rng& rng, const std::vector<VectorXd>&) const override {
    double cr = grain_.circumradius();
    VectorXd u(d_);
    do {
      for (int c = 0; c < d_; ++c) u[c] = rng.uniform(-cr, cr);
    } while (!grain_.contains(u));
    GrainSet grain = grain_;
    return [grain, u](const VectorXd& t) {
      return grain.contains(u - t) ? 1.0 : 0.0;
    };
  }

 private:
  GrainSet grain_;
  int d_;
};

// ---------------------------------------------------------------------------
// Independent coordinates: labels encoded as the integer part of the first
// axis, values on the second axis with tail-table intensity -log F.

class IidModel final : public SpectralModel {
 public:
  IidModel(const std::vector<double>& cdf_x, const std::vector<double>& cdf_p,
           int index_count)
      : index_count_(index_count) {
    if (index_count < 1)
      throw std::invalid_argument("iid: index_count must be >= 1");
    if (cdf_x.size() != cdf_p.size() || cdf_x.size() < 2)
      throw std::invalid_argument("iid: bad CDF table");
    auto table = std::make_shared<TailTable>();
    table->x = cdf_x;
    table->m.resize(cdf_p.size());
    for (size_t i = 0; i < cdf_p.size(); ++i) {
      if (i > 0 && cdf_p[i] < cdf_p[i - 1])
        throw std::invalid_argument("iid: CDF table must be nondecreasing");
      if (!(cdf_p[i] > 0.0))
        throw std::invalid_argument("iid: CDF table values must be positive");
      table->m[i] = -std::log(std::min(1.0, cdf_p[i]));
    }
    if (cdf_p.back() != 1.0)
      throw std::invalid_argument("iid: CDF table must reach 1");
    table->validate();
    table_ = std::move(table);
    intensity_.lambda = 1.0;
    intensity_.axes.assign(2, AxisLaw{});
    intensity_.axes[1].kind = AxisLaw::kTailTable;
    intensity_.axes[1].table = table_;
  }

  std::string kind() const override { return "iid"; }
  int index_dim() const override { return 1; }
  bool stationary() const override { return false; }

  double eval(const VectorXd& t, const Atom& atom) const override {
    int label = static_cast<int>(std::floor(atom.loc[0]));
    return label == static_cast<int>(std::llround(t[0])) ? atom.loc[1] : 0.0;
  }

  double level_mass(const VectorXd&, double a) const override {
    return table_->mass_above(a);
  }

  double union_mass(const std::vector<VectorXd>& ts,
                    const std::vector<double>& xs, const QuadratureSpec&,
                    double* std_error) const override {
    // disjoint supports across labels; same label keeps the min threshold
    std::vector<std::pair<long, double>> mins;
    for (size_t j = 0; j < ts.size(); ++j) {
      long label = std::llround(ts[j][0]);
      bool found = false;
      for (auto& [l, x] : mins)
        if (l == label) {
          x = std::min(x, xs[j]);
          found = true;
        }
      if (!found) mins.emplace_back(label, xs[j]);
    }
    double total = 0.0;
    for (auto& [l, x] : mins) total += table_->mass_above(x);
    if (std_error) *std_error = 0.0;
    return total;
  }

  Window window_for(const VectorXd& t_lo, const VectorXd& t_hi,
                    double budget) const override {
    double xb = table_->inverse_mass(-std::log(budget));
    Window win;
    win.lower.resize(2);
    win.upper.resize(2);
    win.lower << std::floor(t_lo[0]), xb;
    win.upper << std::floor(t_hi[0]) + 1.0, table_->x.back();
    win.mark_descriptor = "none";
    return win;
  }

  double tail_mass(const VectorXd& t, double a,
                   const Window& w) const override {
    if (t[0] < w.lower[0] || t[0] >= w.upper[0])
      return table_->mass_above(a);
    return std::max(0.0,
                    table_->mass_above(a) - table_->mass_above(w.lower[1]));
  }

 private:
  std::shared_ptr<const TailTable> table_;
  int index_count_;
};

// ---------------------------------------------------------------------------
// Frechet product lift: f_t(u, j) = u G(t, j), intensity
// alpha u^{-(alpha+1)} du x base masses.

class FrechetLiftModel final : public SpectralModel {
 public:
  FrechetLiftModel(Eigen::MatrixXd G, VectorXd base_mass, double alpha)
      : G_(std::move(G)), base_mass_(std::move(base_mass)), alpha_(alpha) {
    if (!(alpha > 0.0))
      throw std::invalid_argument("frechet_lift: alpha must be positive");
    if (G_.cols() != base_mass_.size() || G_.size() == 0)
      throw std::invalid_argument("frechet_lift: G/base_mass mismatch");
    if ((G_.array() < 0.0).any())
      throw std::invalid_argument("frechet_lift: g_t must be nonnegative");
    if ((base_mass_.array() <= 0.0).any())
      throw std::invalid_argument("frechet_lift: base masses must be > 0");
    for (Eigen::Index t = 0; t < G_.rows(); ++t) {
      if (!(sigma_alpha(t) > 0.0) || !std::isfinite(sigma_alpha(t)))
        throw std::invalid_argument(
            "frechet_lift: divergent or zero alpha-moment at index " +
            std::to_string(t));
    }
    intensity_.lambda = 1.0;
    intensity_.axes.assign(2, AxisLaw{});
    intensity_.axes[0].kind = AxisLaw::kFrechetTail;
    intensity_.axes[0].alpha = alpha;
    intensity_.axes[1].kind = AxisLaw::kWeightedDiscrete;
    intensity_.axes[1].weights.assign(base_mass_.begin(), base_mass_.end());
  }

  std::string kind() const override { return "frechet_lift"; }
  int index_dim() const override { return 1; }
  bool stationary() const override { return false; }

  double sigma_alpha(Eigen::Index t) const {
    return (G_.row(t).array().pow(alpha_) * base_mass_.transpose().array())
        .sum();
  }

  double eval(const VectorXd& t, const Atom& atom) const override {
    Eigen::Index ti = std::llround(t[0]);
    Eigen::Index j = std::llround(atom.loc[1]);
    return atom.loc[0] * G_(ti, j);
  }

  double level_mass(const VectorXd& t, double x) const override {
    return sigma_alpha(std::llround(t[0])) * std::pow(x, -alpha_);
  }

  double union_mass(const std::vector<VectorXd>& ts,
                    const std::vector<double>& xs, const QuadratureSpec&,
                    double* std_error) const override {
    // mu(union {u g_{t_i}(j) >= x_i}) = sum_j m_j max_i (g/x)^alpha
    double total = 0.0;
    for (Eigen::Index j = 0; j < base_mass_.size(); ++j) {
      double best = 0.0;
      for (size_t i = 0; i < ts.size(); ++i) {
        Eigen::Index ti = std::llround(ts[i][0]);
        best = std::max(best, std::pow(G_(ti, j) / xs[i], alpha_));
      }
      total += base_mass_[j] * best;
    }
    if (std_error) *std_error = 0.0;
    return total;
  }

  Window window_for(const VectorXd& t_lo, const VectorXd& t_hi,
                    double budget) const override {
    double gmax = G_.maxCoeff();
    double smax = 0.0;
    for (Eigen::Index t = std::llround(t_lo[0]); t <= std::llround(t_hi[0]);
         ++t)
      smax = std::max(smax, sigma_alpha(t));
    double xb = std::pow(smax / std::log(1.0 / budget), 1.0 / alpha_);
    Window win;
    win.lower.resize(2);
    win.upper.resize(2);
    win.lower << xb / gmax, 0.0;
    win.upper << std::numeric_limits<double>::infinity(),
        static_cast<double>(base_mass_.size() - 1);
    win.mark_descriptor = "frechet(" + std::to_string(alpha_) + ")";
    return win;
  }

  double tail_mass(const VectorXd& t, double a,
                   const Window& w) const override {
    // atoms with u below the window cutoff
    Eigen::Index ti = std::llround(t[0]);
    double umin = w.lower[0];
    double total = 0.0;
    for (Eigen::Index j = 0; j < base_mass_.size(); ++j) {
      double g = G_(ti, j);
      if (g <= 0.0) continue;
      double need = a / g;
      double m = std::pow(need, -alpha_) - std::pow(std::max(need, umin),
                                                    -alpha_);
      total += base_mass_[j] * std::max(0.0, m);
    }
    return total;
  }

 private:
  Eigen::MatrixXd G_;
  VectorXd base_mass_;
  double alpha_;
};

// ---------------------------------------------------------------------------

ModelPtr make_iid(const std::vector<double>& cdf_x,
                  const std::vector<double>& cdf_p, int index_count) {
  return std::make_shared<IidModel>(cdf_x, cdf_p, index_count);
}

ModelPtr make_moving_maxima(const StormProfile& storm, double lambda, int d) {
  return std::make_shared<MovingMaximaModel>(storm, lambda, d);
}

ModelPtr make_poisson_line(const StormProfile& storm, double lambda) {
  return std::make_shared<PoissonLineModel>(storm, lambda);
}

ModelPtr make_poisson_line_maxstable(const StormProfile& storm, double lambda,
                                     double alpha) {
  return std::make_shared<PoissonLineMaxStableModel>(storm, lambda, alpha);
}

ModelPtr make_penrose(const PenroseSpec& spec,
                      const std::vector<VectorXd>& grid) {
  return std::make_shared<PenroseModel>(spec, grid);
}

ModelPtr make_boolean(const GrainSet& grain, double lambda, int d) {
  return std::make_shared<BooleanModel>(grain, lambda, d);
}

ModelPtr make_frechet_lift(const Eigen::MatrixXd& G, const VectorXd& base_mass,
                           double alpha) {
  return std::make_shared<FrechetLiftModel>(G, base_mass, alpha);
}

}  // namespace maxid
