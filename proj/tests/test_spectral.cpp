#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "maxid/integrator.hpp"
#include "maxid/spectral.hpp"
#include "maxid/stats.hpp"

using namespace maxid;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

StormProfile exp_storm(double h, double s) {
  StormProfile f;
  f.shape = StormProfile::kExpBump;
  f.height = h;
  f.scale = s;
  return f;
}

VectorXd pt(double x) { return VectorXd::Constant(1, x); }

VectorXd pt2(double x, double y) {
  VectorXd t(2);
  t << x, y;
  return t;
}

// one field value per independent configuration
std::vector<double> margin_sample(const SpectralModel& m, const VectorXd& t,
                                  double budget, int n, std::uint64_t seed) {
  Window w = m.window_for(t, t, budget);
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    PointConfig pc = sample_poisson(m.intensity(), w, seed + i);
    out.push_back(max_integral(m, t, pc));
  }
  return out;
}

}  // namespace

TEST_CASE("grain sets") {
  GrainSet disk;
  disk.shape = GrainSet::kDisk;
  disk.radius = 2.0;
  disk.dim = 2;
  CHECK(disk.measure() == Approx(4.0 * kPi));
  CHECK(disk.circumradius() == 2.0);
  CHECK(disk.contains(pt2(1.0, 1.0)));
  CHECK_FALSE(disk.contains(pt2(2.0, 1.0)));

  GrainSet box;
  box.shape = GrainSet::kBox;
  box.dim = 2;
  box.half_widths = pt2(1.0, 0.5);
  CHECK(box.measure() == Approx(2.0));
  CHECK(box.circumradius() == Approx(std::sqrt(1.25)));
  CHECK(box.contains(pt2(0.9, -0.4)));
  CHECK_FALSE(box.contains(pt2(0.9, 0.6)));

  box.half_widths = pt2(1.0, -1.0);
  CHECK_THROWS(box.validate());
}

TEST_CASE("iid model margins follow the tabulated CDF") {
  std::vector<double> x = {0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<double> p = {0.135, 0.37, 0.61, 0.78, 1.0};
  ModelPtr m = make_iid(x, p, 4);
  CHECK(m->kind() == "iid");
  CHECK_FALSE(m->stationary());
  for (size_t i = 0; i + 1 < x.size(); ++i)
    CHECK(m->margin_cdf(pt(0.0), x[i]) == Approx(p[i]));
  CHECK(m->level_mass(pt(2.0), 1.0) == Approx(-std::log(0.37)));

  CHECK_THROWS(make_iid({1.0, 2.0}, {0.5, 0.4}, 2));   // decreasing CDF
  CHECK_THROWS(make_iid({1.0, 2.0}, {0.5, 0.9}, 2));   // does not reach 1
  CHECK_THROWS(m->shift_atom(Atom{}, pt(1.0)));        // no shift action
  CHECK_THROWS(m->core_mass());

  const int n = 20000;
  double budget = 1e-4;
  std::vector<double> at0 = margin_sample(*m, pt(0.0), budget, n, 100);
  for (size_t i = 0; i + 1 < x.size(); ++i) {
    int below = 0;
    for (double v : at0) below += v < x[i];
    double se = std::sqrt(p[i] * (1.0 - p[i]) / n);
    CHECK(std::abs(static_cast<double>(below) / n - p[i]) <
          3.0 * se + budget);
  }
}

TEST_CASE("iid coordinates at distinct labels are independent") {
  std::vector<double> x = {0.5, 1.0, 2.0};
  std::vector<double> p = {0.3, 0.7, 1.0};
  ModelPtr m = make_iid(x, p, 2);
  Window w = m->window_for(pt(0.0), pt(1.0), 1e-4);
  const int n = 20000;
  double c01 = 0.0, c0 = 0.0, c1 = 0.0;
  for (int i = 0; i < n; ++i) {
    PointConfig pc = sample_poisson(m->intensity(), w, 5000 + i);
    bool a = max_integral(*m, pt(0.0), pc) < 1.0;
    bool b = max_integral(*m, pt(1.0), pc) < 1.0;
    c0 += a;
    c1 += b;
    c01 += a && b;
  }
  c0 /= n;
  c1 /= n;
  c01 /= n;
  CHECK(std::abs(c01 - c0 * c1) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("moving maxima margin is the squared-power law") {
  // lambda 1, exponential storm: P[X < x] = exp(-2 log(1/x)) = x^2 on (0,1]
  ModelPtr m = make_moving_maxima(exp_storm(1.0, 1.0), 1.0, 1);
  CHECK(m->kind() == "moving_maxima");
  CHECK(m->level_mass(pt(0.0), 0.5) == Approx(2.0 * std::log(2.0)));
  CHECK(m->margin_cdf(pt(0.0), 0.25) == Approx(0.0625));
  CHECK(m->margin_quantile(pt(0.0), 0.81) == Approx(0.9).epsilon(1e-9));

  const int n = 20000;
  std::vector<double> s = margin_sample(*m, pt(0.0), 1e-5, n, 200);
  auto cdf = [](double v) {
    return v <= 0.0 ? 0.0 : std::min(1.0, v * v);
  };
  CHECK(ks_statistic(s, cdf) < 1.95 / std::sqrt(static_cast<double>(n)) + 1e-5);
}

TEST_CASE("moving maxima is stationary") {
  ModelPtr m = make_moving_maxima(exp_storm(1.0, 1.0), 1.0, 1);
  const int n = 10000;
  std::vector<double> a = margin_sample(*m, pt(0.0), 1e-5, n, 1);
  std::vector<double> b = margin_sample(*m, pt(7.0), 1e-5, n, 70001);
  double crit = 1.95 * std::sqrt(2.0 / static_cast<double>(n));
  CHECK(ks_two_sample(a, b) < crit + 2e-5);
}

TEST_CASE("moving maxima with an indicator storm has exact vacancy") {
  StormProfile ind;
  ind.shape = StormProfile::kIndicator;
  ind.height = 1.0;
  ind.scale = 2.0;  // support [-2, 2]
  ModelPtr m = make_moving_maxima(ind, 0.5, 1);
  const int n = 20000;
  std::vector<double> s = margin_sample(*m, pt(0.0), 1e-6, n, 400);
  int zeros = 0;
  for (double v : s) zeros += v == 0.0;
  double pz = std::exp(-2.0);  // exp(-lambda * 4)
  CHECK(std::abs(static_cast<double>(zeros) / n - pz) <
        3.0 * std::sqrt(pz * (1.0 - pz) / n) + 1e-6);
}

TEST_CASE("moving maxima exact union masses") {
  ModelPtr m = make_moving_maxima(exp_storm(1.0, 1.0), 1.0, 1);
  QuadratureSpec quad;
  double err = -1.0;
  // far-apart points: level intervals are disjoint, masses add
  double u = m->union_mass({pt(0.0), pt(100.0)}, {0.5, 0.25}, quad, &err);
  CHECK(err == 0.0);
  CHECK(u == Approx(2.0 * std::log(2.0) + 2.0 * std::log(4.0)));
  // coincident points keep the lower threshold
  CHECK(m->union_mass({pt(0.0), pt(0.0)}, {0.5, 0.25}, quad) ==
        Approx(2.0 * std::log(4.0)));
}

TEST_CASE("shift covariance of the stationary models") {
  Rng rng = Rng::derive(77, "shift_test");
  StormProfile f = exp_storm(1.0, 1.0);

  ModelPtr mm = make_moving_maxima(f, 1.0, 1);
  ModelPtr line = make_poisson_line(f, 1.0);
  GrainSet disk;
  disk.shape = GrainSet::kDisk;
  disk.radius = 1.0;
  ModelPtr boolean = make_boolean(disk, 1.0, 2);

  for (int i = 0; i < 50; ++i) {
    Atom a;
    a.loc = VectorXd::Constant(2, 0.0);
    a.loc[0] = rng.uniform(-3.0, 3.0);
    a.loc[1] = rng.uniform(0.0, 1.0);
    VectorXd s = pt(rng.uniform(-2.0, 2.0));
    VectorXd t = pt(rng.uniform(-2.0, 2.0));
    VectorXd ts = t + s;
    CHECK(mm->eval(ts, a) == Approx(mm->eval(t, mm->shift_atom(a, s))));

    Atom la;
    la.loc.resize(3);
    la.loc << rng.uniform(-4.0, 4.0), rng.uniform(0.0, 2.0 * kPi),
        rng.uniform(0.0, 1.0);
    VectorXd s2 = pt2(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    VectorXd t2 = pt2(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    CHECK(line->eval(t2 + s2, la) ==
          Approx(line->eval(t2, line->shift_atom(la, s2))));

    Atom ba;
    ba.loc = pt2(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    CHECK(boolean->eval(t2 + s2, ba) ==
          boolean->eval(t2, boolean->shift_atom(ba, s2)));
  }
}

TEST_CASE("line process margin exponent is 4 pi") {
  // level_mass = lambda 2pi * 2 log(1/x): P[X < x] = x^{4 pi}
  ModelPtr m = make_poisson_line(exp_storm(1.0, 1.0), 1.0);
  CHECK(m->kind() == "poisson_line");
  CHECK(m->index_dim() == 2);
  CHECK(m->level_mass(pt2(0, 0), 0.5) == Approx(4.0 * kPi * std::log(2.0)));
  CHECK(m->margin_cdf(pt2(0, 0), 0.9) ==
        Approx(std::pow(0.9, 4.0 * kPi)).epsilon(1e-9));

  const int n = 5000;
  std::vector<double> s = margin_sample(*m, pt2(0.0, 0.0), 1e-4, n, 900);
  auto cdf = [](double v) {
    return v <= 0.0 ? 0.0 : std::min(1.0, std::pow(v, 4.0 * kPi));
  };
  CHECK(ks_statistic(s, cdf) <
        1.95 / std::sqrt(static_cast<double>(n)) + 1e-4);
}

TEST_CASE("line process is rotation invariant") {
  ModelPtr m = make_poisson_line(exp_storm(1.0, 1.0), 1.0);
  const int n = 5000;
  // same distance from the origin along different directions
  Window w = m->window_for(pt2(1.0, 0.0), pt2(1.0, 0.0), 1e-4);
  Window w2 = m->window_for(pt2(0.0, 1.0), pt2(0.0, 1.0), 1e-4);
  std::vector<double> a, b;
  for (int i = 0; i < n; ++i) {
    a.push_back(
        max_integral(*m, pt2(1.0, 0.0), sample_poisson(m->intensity(), w, i)));
    b.push_back(max_integral(*m, pt2(0.0, 1.0),
                             sample_poisson(m->intensity(), w2, 90000 + i)));
  }
  CHECK(ks_two_sample(a, b) <
        1.95 * std::sqrt(2.0 / static_cast<double>(n)) + 2e-4);
}

TEST_CASE("max-stable line process has exact Frechet margins") {
  // F = e^{-|tau|}, alpha = 1, lambda = 1: sigma^alpha = 2 pi * 2 = 4 pi
  ModelPtr m = make_poisson_line_maxstable(exp_storm(1.0, 1.0), 1.0, 1.0);
  CHECK(m->kind() == "poisson_line_maxstable");
  CHECK(m->level_mass(pt2(0, 0), 2.0) == Approx(2.0 * kPi));
  CHECK(m->margin_cdf(pt2(0, 0), 4.0 * kPi) == Approx(std::exp(-1.0)));

  const int n = 2000;
  std::vector<double> s = margin_sample(*m, pt2(0.0, 0.0), 1e-3, n, 1200);
  auto cdf = [](double v) {
    return v <= 0.0 ? 0.0 : std::exp(-4.0 * kPi / v);
  };
  CHECK(ks_statistic(s, cdf) <
        1.95 / std::sqrt(static_cast<double>(n)) + 1e-3);
}

TEST_CASE("max of rescaled independent copies keeps the law") {
  ModelPtr m = make_poisson_line_maxstable(exp_storm(1.0, 1.0), 1.0, 1.0);
  const int n = 1500;
  std::vector<double> single = margin_sample(*m, pt2(0.0, 0.0), 1e-3, n, 3000);
  Window w = m->window_for(pt2(0.0, 0.0), pt2(0.0, 0.0), 1e-3);
  std::vector<double> maxed;
  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    for (int j = 0; j < 4; ++j)
      v = std::max(v, max_integral(*m, pt2(0.0, 0.0),
                                   sample_poisson(m->intensity(), w,
                                                  700000 + 4 * i + j)));
    maxed.push_back(v / 4.0);  // alpha = 1 rescaling
  }
  CHECK(ks_two_sample(single, maxed) <
        1.95 * std::sqrt(2.0 / static_cast<double>(n)) + 4e-3);
}

TEST_CASE("nearest-point distance law of the min-oriented model") {
  // k = 1 at t = 0: P[X(0) > r] = P[no point within r] = exp(-2 lambda r)
  PenroseSpec spec;
  spec.k = 1;
  spec.lambda = 1.0;
  std::vector<VectorXd> grid = {pt(0.0)};
  ModelPtr m = make_penrose(spec, grid);
  CHECK(m->orientation() == Orientation::kMin);
  Window w = m->window_for(pt(0.0), pt(0.0), 1e-5);
  const int n = 20000;
  int above = 0;
  for (int i = 0; i < n; ++i) {
    PointConfig pc = sample_poisson(m->intensity(), w, i);
    above += max_integral(*m, pt(0.0), pc) > 0.3;
  }
  double p = std::exp(-0.6);
  CHECK(std::abs(static_cast<double>(above) / n - p) <
        3.0 * std::sqrt(p * (1.0 - p) / n) + 1e-5);
}

TEST_CASE("denser point clouds shrink the minimum") {
  std::vector<VectorXd> grid = {pt(0.0)};
  double last = std::numeric_limits<double>::infinity();
  for (double lambda : {1.0, 10.0, 100.0}) {
    PenroseSpec spec;
    spec.k = 1;
    spec.lambda = lambda;
    ModelPtr m = make_penrose(spec, grid);
    Window w = m->window_for(pt(0.0), pt(0.0), 1e-4);
    std::vector<double> s;
    const int n = 4000;
    for (int i = 0; i < n; ++i)
      s.push_back(max_integral(*m, pt(0.0),
                               sample_poisson(m->intensity(), w, 40 + i)));
    std::sort(s.begin(), s.end());
    double median = s[n / 2];
    CHECK(median < last);
    // exact median of exp(-2 lambda r): log 2 / (2 lambda)
    CHECK(median == Approx(std::log(2.0) / (2.0 * lambda)).epsilon(0.15));
    last = median;
  }
}

TEST_CASE("min-oriented field is stationary across its grid") {
  PenroseSpec spec;
  spec.k = 1;
  spec.lambda = 1.0;
  std::vector<VectorXd> grid = {pt(0.0), pt(0.5), pt(1.0)};
  ModelPtr m = make_penrose(spec, grid);
  Window w = m->window_for(pt(0.0), pt(1.0), 1e-5);
  const int n = 15000;
  int a = 0, b = 0;
  for (int i = 0; i < n; ++i) {
    PointConfig pc = sample_poisson(m->intensity(), w, 300 + i);
    a += max_integral(*m, pt(0.0), pc) > 0.3;
    b += max_integral(*m, pt(1.0), pc) > 0.3;
  }
  double p = std::exp(-0.6);
  double se = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(static_cast<double>(a) / n - p) < 3.0 * se + 1e-5);
  CHECK(std::abs(static_cast<double>(b) / n - p) < 3.0 * se + 1e-5);
}

TEST_CASE("min-oriented shift action matches direct evaluation") {
  PenroseSpec spec;
  spec.k = 1;
  spec.lambda = 1.0;
  std::vector<VectorXd> grid = {pt(0.0), pt(0.5), pt(1.0)};
  ModelPtr m = make_penrose(spec, grid);
  Window w = m->window_for(pt(0.0), pt(1.0), 1e-3);
  PointConfig pc = sample_poisson(m->intensity(), w, 9);
  REQUIRE_FALSE(pc.atoms.empty());
  // T_{0.5} maps the value at 1.0 to the value at 0.5
  for (const Atom& a : pc.atoms) {
    Atom sh = m->shift_atom(a, pt(0.5));
    CHECK(m->eval(pt(0.5), sh) == Approx(m->eval(pt(1.0), a)));
    CHECK(m->eval(pt(0.0), sh) == Approx(m->eval(pt(0.5), a)));
  }
}

TEST_CASE("fbm storms reject classification and shifts") {
  PenroseSpec spec;
  spec.storm_kind = PenroseSpec::kFbmField;
  spec.fbm.hurst = 0.5;
  std::vector<VectorXd> grid = {pt2(0.0, 0.0), pt2(0.05, 0.0)};
  ModelPtr m = make_penrose(spec, grid);
  CHECK(m->index_dim() == 2);
  CHECK_THROWS(m->shift_atom(Atom{}, pt2(0.05, 0.0)));
  Rng rng(3);
  CHECK_THROWS(m->sample_core_trajectory(rng, grid));
}

TEST_CASE("boolean model vacancy and occupancy") {
  GrainSet disk;
  disk.shape = GrainSet::kDisk;
  disk.radius = 1.0;
  ModelPtr m = make_boolean(disk, 1.0, 2);
  CHECK(m->kind() == "boolean_set");
  CHECK(m->level_mass(pt2(0, 0), 1.0) == Approx(kPi));
  CHECK(m->level_mass(pt2(0, 0), 1.5) == 0.0);

  const int n = 20000;
  Window w = m->window_for(pt2(0.0, 0.0), pt2(0.0, 0.0), 0.0);
  int occupied = 0;
  for (int i = 0; i < n; ++i) {
    double v =
        max_integral(*m, pt2(0.0, 0.0), sample_poisson(m->intensity(), w, i));
    CHECK((v == 0.0 || v == 1.0));
    occupied += v == 1.0;
  }
  double p = -std::expm1(-kPi);
  CHECK(std::abs(static_cast<double>(occupied) / n - p) <
        3.0 * std::sqrt(p * (1.0 - p) / n));
}

TEST_CASE("boolean union masses") {
  GrainSet disk;
  disk.shape = GrainSet::kDisk;
  disk.radius = 1.0;
  ModelPtr m = make_boolean(disk, 2.0, 2);
  QuadratureSpec quad;
  double err = -1.0;
  CHECK(m->union_mass({pt2(0, 0)}, {0.5}, quad, &err) == Approx(2.0 * kPi));
  CHECK(err == 0.0);
  // thresholds above the indicator height contribute nothing
  CHECK(m->union_mass({pt2(0, 0)}, {1.5}, quad) == 0.0);
  // far-apart grains: masses add; MC estimate carries its own error bar
  double u = m->union_mass({pt2(0, 0), pt2(10, 0)}, {1.0, 1.0}, quad, &err);
  CHECK(std::abs(u - 4.0 * kPi) < 4.0 * err);
}

TEST_CASE("frechet lift closed forms") {
  Eigen::MatrixXd G(2, 2);
  G << 1.0, 2.0, 3.0, 1.0;
  VectorXd mass(2);
  mass << 0.5, 1.5;
  ModelPtr m = make_frechet_lift(G, mass, 2.0);
  CHECK(m->kind() == "frechet_lift");
  CHECK_FALSE(m->stationary());
  // sigma^2(0) = 1 * 0.5 + 4 * 1.5 = 6.5
  CHECK(m->level_mass(pt(0.0), 1.0) == Approx(6.5));
  CHECK(m->level_mass(pt(1.0), 2.0) == Approx((9.0 * 0.5 + 1.5) / 4.0));
  CHECK(m->margin_cdf(pt(0.0), 2.0) == Approx(std::exp(-6.5 / 4.0)));

  QuadratureSpec quad;
  double err = -1.0;
  double u = m->union_mass({pt(0.0), pt(1.0)}, {1.0, 2.0}, quad, &err);
  CHECK(err == 0.0);
  CHECK(u == Approx(0.5 * 2.25 + 1.5 * 4.0));

  CHECK_THROWS(make_frechet_lift(G, mass, -1.0));
  Eigen::MatrixXd neg = G;
  neg(0, 0) = -1.0;
  CHECK_THROWS(make_frechet_lift(neg, mass, 2.0));
}

TEST_CASE("frechet lift margins scale like alpha-Frechet laws") {
  Eigen::MatrixXd G(1, 2);
  G << 1.0, 2.0;
  VectorXd mass(2);
  mass << 1.0, 1.0;
  ModelPtr m = make_frechet_lift(G, mass, 1.0);
  double sigma = 3.0;  // 1 + 2
  const int n = 10000;
  std::vector<double> s = margin_sample(*m, pt(0.0), 1e-4, n, 7000);
  auto cdf = [sigma](double v) {
    return v <= 0.0 ? 0.0 : std::exp(-sigma / v);
  };
  CHECK(ks_statistic(s, cdf) <
        1.95 / std::sqrt(static_cast<double>(n)) + 1e-4);
}

TEST_CASE("models without oracles say so by name") {
  GrainSet disk;
  disk.shape = GrainSet::kDisk;
  ModelPtr m = make_boolean(disk, 1.0, 2);
  CHECK(m->default_psi().kind == PsiSpec::kTruncSquare);
  CHECK(m->alternate_psi().kind == PsiSpec::kInvExp);
}
