#include "maxid/flowclass.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "maxid/integrator.hpp"

namespace maxid {

namespace {

// MC estimate of int_W psi(|f_0|) dmu.
double psi_mass(const SpectralModel& model, const PsiSpec& psi,
                const Window& w, int n, std::uint64_t seed, double* err) {
  double total = model.intensity().mass(w);
  Rng rng = Rng::derive(seed, "psi_mass");
  VectorXd origin = VectorXd::Zero(model.index_dim());
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    Atom atom;
    atom.loc.resize(w.dim());
    for (int c = 0; c < w.dim(); ++c)
      atom.loc[c] =
          model.intensity().axes[c].sample(w.lower[c], w.upper[c], rng);
    if (model.intensity().mark) {
      Rng mark_rng = Rng::derive(seed, "psi_mass_mark", i);
      atom.mark = model.intensity().mark->draw(mark_rng);
    }
    double v = psi(std::abs(model.eval(origin, atom)));
    sum += v;
    sum2 += v * v;
  }
  double mean = sum / n;
  double var = std::max(0.0, sum2 / n - mean * mean);
  if (err) *err = total * std::sqrt(var / n);
  return total * mean;
}

// Numeric registration check: the psi-integral over the origin's windows
// must saturate as the truncation budget shrinks.
void check_admissible(const SpectralModel& model, const PsiSpec& psi,
                      std::uint64_t seed) {
  VectorXd origin = VectorXd::Zero(model.index_dim());
  Window small = model.window_for(origin, origin, 1e-8);
  Window big = model.window_for(origin, origin, 1e-30);
  const int n = 20000;
  double err_s = 0.0, err_b = 0.0;
  double est_s = psi_mass(model, psi, small, n, seed, &err_s);
  double est_b = psi_mass(model, psi, big, n, seed + 1, &err_b);
  if (est_b > 1.3 * est_s + 5.0 * (err_s + err_b))
    throw std::runtime_error("psi not admissible");
}

struct TGrid {
  std::vector<VectorXd> points;
  std::vector<int> bucket;  // smallest radius index covering the point
  double cell_volume = 0.0;
};

TGrid make_tgrid(int d, const std::vector<double>& radii, double step) {
  double rm = radii.back();
  TGrid g;
  if (d == 1) {
    int n = std::max(2, static_cast<int>(std::ceil(2.0 * rm / step)));
    double h = 2.0 * rm / n;
    g.cell_volume = h;
    g.points.reserve(n);
    g.bucket.reserve(n);
    for (int i = 0; i < n; ++i) {
      double t = -rm + (i + 0.5) * h;
      VectorXd v(1);
      v << t;
      auto it = std::lower_bound(radii.begin(), radii.end(), std::abs(t));
      if (it == radii.end()) continue;
      g.points.push_back(v);
      g.bucket.push_back(static_cast<int>(it - radii.begin()));
    }
  } else if (d == 2) {
    int n = std::min(512, std::max(2, static_cast<int>(
                                          std::ceil(2.0 * rm / step))));
    double h = 2.0 * rm / n;
    g.cell_volume = h * h;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        VectorXd v(2);
        v << -rm + (i + 0.5) * h, -rm + (j + 0.5) * h;
        double m = v.cwiseAbs().maxCoeff();
        auto it = std::lower_bound(radii.begin(), radii.end(), m);
        if (it == radii.end()) continue;
        g.points.push_back(v);
        g.bucket.push_back(static_cast<int>(it - radii.begin()));
      }
  } else {
    throw std::runtime_error("flow classification supports d <= 2");
  }
  return g;
}

VectorXd growth_curve(const std::function<double(const VectorXd&)>& traj,
                      const PsiSpec& psi, const TGrid& g, int n_radii) {
  VectorXd acc = VectorXd::Zero(n_radii);
  for (size_t i = 0; i < g.points.size(); ++i)
    acc[g.bucket[i]] += psi(std::abs(traj(g.points[i]))) * g.cell_volume;
  for (int j = 1; j < n_radii; ++j) acc[j] += acc[j - 1];
  return acc;
}

bool diverging(const VectorXd& curve, double ratio) {
  double first = curve[0], last = curve[curve.size() - 1];
  return last > 0.0 && last >= ratio * first;
}

}  // namespace

void FlowClassConfig::validate() const {
  if (radii.size() < 2 || !std::is_sorted(radii.begin(), radii.end()) ||
      !(radii.front() > 0.0))
    throw std::invalid_argument("flow config: radii must be increasing > 0");
  if (samples < 1)
    throw std::invalid_argument("flow config: samples must be >= 1");
  if (!(divergence_ratio > 1.0))
    throw std::invalid_argument("flow config: divergence ratio must be > 1");
  if (!(grid_step > 0.0))
    throw std::invalid_argument("flow config: grid step must be > 0");
}

FlowClassReport classify(const SpectralModel& model,
                         const FlowClassConfig& config) {
  config.validate();
  if (!model.stationary())
    throw std::runtime_error("flow classification needs a stationary model");
  PsiSpec psi = config.use_model_psi ? model.default_psi() : config.psi;
  check_admissible(model, psi, config.seed);

  TGrid grid = make_tgrid(model.index_dim(), config.radii, config.grid_step);
  const int m = static_cast<int>(config.radii.size());

  FlowClassReport report;
  report.psi_name = psi.name();
  report.radii = config.radii;
  report.growth.resize(config.samples, m);
  report.labels.resize(config.samples);

  int n_div = 0;
  for (int i = 0; i < config.samples; ++i) {
    Rng rng = Rng::derive(config.seed, "flow_omega", i);
    auto traj = model.sample_core_trajectory(rng, grid.points);
    VectorXd curve = growth_curve(traj, psi, grid, m);
    report.growth.row(i) = curve;
    bool div = diverging(curve, config.divergence_ratio);
    report.labels[i] = div ? 1 : 0;
    n_div += div;
  }
  report.diverging_fraction =
      static_cast<double>(n_div) / config.samples;
  report.verdict = report.diverging_fraction >= 0.95   ? "conservative"
                   : report.diverging_fraction <= 0.05 ? "dissipative"
                                                       : "undecided";
  return report;
}

SplitFields cd_split_simulate(const SpectralModel& model,
                              const FlowClassConfig& config,
                              const std::vector<VectorXd>& grid,
                              std::uint64_t seed) {
  config.validate();
  if (grid.empty()) throw std::invalid_argument("cd_split: empty grid");
  if (!model.stationary())
    throw std::runtime_error("flow classification needs a stationary model");
  PsiSpec psi = config.use_model_psi ? model.default_psi() : config.psi;
  check_admissible(model, psi, config.seed);

  VectorXd lo = grid.front(), hi = grid.front();
  for (const VectorXd& t : grid) {
    lo = lo.cwiseMin(t);
    hi = hi.cwiseMax(t);
  }
  Window w = model.window_for(lo, hi, 1e-3);
  PointConfig full = sample_poisson(model.intensity(), w, seed);

  TGrid tgrid = make_tgrid(model.index_dim(), config.radii, config.grid_step);
  const int m = static_cast<int>(config.radii.size());

  PointConfig cons, diss;
  cons.window = diss.window = w;
  cons.seed = diss.seed = seed;
  int undecided = 0;
  for (const Atom& atom : full.atoms) {
    auto traj = [&](const VectorXd& t) { return model.eval(t, atom); };
    VectorXd curve = growth_curve(traj, psi, tgrid, m);
    double first = curve[0], last = curve[m - 1];
    bool div = last > 0.0 && last >= config.divergence_ratio * first;
    bool settled = last <= std::sqrt(config.divergence_ratio) *
                               std::max(first, 0.0);
    if (!div && !settled) ++undecided;
    (div ? cons : diss).atoms.push_back(atom);
  }
  double frac_undecided =
      full.atoms.empty()
          ? 0.0
          : static_cast<double>(undecided) / full.atoms.size();
  if (frac_undecided > 0.1)
    throw std::runtime_error(
        "cd_split: over 10% of atoms undecided; enlarge the radii");

  SplitFields out;
  out.undecided_fraction = frac_undecided;
  out.full.reserve(grid.size());
  for (const VectorXd& t : grid) {
    out.full.push_back(max_integral(model, t, full));
    out.conservative_part.push_back(max_integral(model, t, cons));
    out.dissipative_part.push_back(max_integral(model, t, diss));
  }
  return out;
}

}  // namespace maxid
