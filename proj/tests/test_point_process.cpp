#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "doctest.h"
#include "maxid/point_process.hpp"

using namespace maxid;
using doctest::Approx;

namespace {

IntensityMeasure lebesgue_1d(double lambda) {
  IntensityMeasure mu;
  mu.lambda = lambda;
  mu.axes.assign(1, AxisLaw{});
  return mu;
}

Window interval(double lo, double hi) {
  Window w;
  w.lower = VectorXd::Constant(1, lo);
  w.upper = VectorXd::Constant(1, hi);
  return w;
}

}  // namespace

TEST_CASE("sampling is deterministic in (intensity, window, seed)") {
  IntensityMeasure mu = lebesgue_1d(3.0);
  Window w = interval(0.0, 2.0);
  PointConfig a = sample_poisson(mu, w, 99);
  PointConfig b = sample_poisson(mu, w, 99);
  REQUIRE(a.atoms.size() == b.atoms.size());
  for (size_t i = 0; i < a.atoms.size(); ++i)
    CHECK(a.atoms[i].loc == b.atoms[i].loc);
  PointConfig c = sample_poisson(mu, w, 100);
  bool same = a.atoms.size() == c.atoms.size();
  if (same)
    for (size_t i = 0; i < a.atoms.size(); ++i)
      same = same && a.atoms[i].loc == c.atoms[i].loc;
  CHECK_FALSE(same);
}

TEST_CASE("mean atom count matches the intensity mass") {
  IntensityMeasure mu = lebesgue_1d(2.0);
  Window w = interval(0.0, 5.0);
  CHECK(mu.mass(w) == Approx(10.0));
  const int n = 100000;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    s += static_cast<double>(sample_poisson(mu, w, i).atoms.size());
  CHECK(std::abs(s / n - 10.0) < 3.0 * std::sqrt(10.0 / n));
}

TEST_CASE("probability of an empty configuration") {
  IntensityMeasure mu = lebesgue_1d(1.0);
  Window w = interval(0.0, 1.0);
  const int n = 100000;
  int empty = 0;
  for (int i = 0; i < n; ++i)
    empty += sample_poisson(mu, w, i).atoms.empty();
  CHECK(std::abs(static_cast<double>(empty) / n - std::exp(-1.0)) < 0.005);
}

TEST_CASE("all atoms lie inside the window") {
  IntensityMeasure mu = lebesgue_1d(4.0);
  Window w = interval(-3.0, 7.0);
  PointConfig pc = sample_poisson(mu, w, 5);
  for (const Atom& a : pc.atoms) CHECK(w.contains(a.loc));
}

TEST_CASE("degenerate and infinite windows are rejected") {
  IntensityMeasure mu = lebesgue_1d(1.0);
  CHECK_THROWS(sample_poisson(mu, interval(1.0, 1.0), 0));
  CHECK_THROWS(sample_poisson(mu, interval(2.0, 1.0), 0));
  Window inf = interval(0.0, std::numeric_limits<double>::infinity());
  CHECK_THROWS_WITH(sample_poisson(mu, inf, 0),
                    "window has infinite intensity mass");
}

TEST_CASE("thinning") {
  IntensityMeasure mu = lebesgue_1d(3.0);
  Window w = interval(0.0, 4.0);
  PointConfig pc = sample_poisson(mu, w, 17);

  CHECK_THROWS(thin(pc, 0.0, 1));
  CHECK_THROWS(thin(pc, 1.5, 1));

  PointConfig all = thin(pc, 1.0, 1);
  CHECK(all.atoms.size() == pc.atoms.size());

  PointConfig none;
  none.window = w;
  CHECK(thin(none, 0.5, 1).atoms.empty());

  // thinning at 1/4 leaves Poisson(mass/4) counts
  const int n = 10000;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    s += static_cast<double>(
        thin(sample_poisson(mu, w, i), 0.25, i + 1).atoms.size());
  double mean = 3.0;  // 12 / 4
  CHECK(std::abs(s / n - mean) < 3.0 * std::sqrt(mean / n));
}

TEST_CASE("thin and its complement partition the configuration") {
  IntensityMeasure mu = lebesgue_1d(5.0);
  Window w = interval(0.0, 3.0);
  PointConfig pc = sample_poisson(mu, w, 23);
  PointConfig kept = thin(pc, 0.6, 7);
  PointConfig dropped = thin_complement(pc, 0.6, 7);
  REQUIRE(kept.atoms.size() + dropped.atoms.size() == pc.atoms.size());
  PointConfig merged = superpose({kept, dropped});
  std::multiset<double> a, b;
  for (const Atom& at : pc.atoms) a.insert(at.loc[0]);
  for (const Atom& at : merged.atoms) b.insert(at.loc[0]);
  CHECK(a == b);
}

TEST_CASE("superposition") {
  IntensityMeasure mu = lebesgue_1d(2.0);
  Window w = interval(0.0, 1.0);
  PointConfig c = sample_poisson(mu, w, 1);
  PointConfig empty;
  empty.window = w;
  CHECK(superpose({c, empty}).atoms.size() == c.atoms.size());
  CHECK_THROWS(superpose({}));

  PointConfig other = c;
  other.window = interval(0.0, 2.0);
  CHECK_THROWS(superpose({c, other}));

  // four quarter-intensity samples superpose to the full intensity
  IntensityMeasure quarter = lebesgue_1d(0.5);
  Window w4 = interval(0.0, 4.0);
  const int n = 10000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<PointConfig> parts;
    for (int j = 0; j < 4; ++j)
      parts.push_back(sample_poisson(quarter, w4, 4 * i + j));
    s += static_cast<double>(superpose(parts).atoms.size());
  }
  double mean = 8.0;
  CHECK(std::abs(s / n - mean) < 3.0 * std::sqrt(mean / n));
}

TEST_CASE("counts on disjoint sub-windows are independent") {
  IntensityMeasure mu = lebesgue_1d(1.5);
  Window w = interval(0.0, 2.0);
  // bin counts in [0,1) and [1,2) into 4 categories each; chi^2
  // independence on the 4x4 table, df = 9, critical 27.877 at 1e-3
  const int n = 10000;
  Eigen::Matrix4d table = Eigen::Matrix4d::Zero();
  for (int i = 0; i < n; ++i) {
    PointConfig pc = sample_poisson(mu, w, i);
    int left = 0, right = 0;
    for (const Atom& a : pc.atoms) (a.loc[0] < 1.0 ? left : right)++;
    table(std::min(left, 3), std::min(right, 3)) += 1.0;
  }
  Eigen::Vector4d rows = table.rowwise().sum(), cols = table.colwise().sum();
  double chi2 = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      double expect = rows[r] * cols[c] / n;
      if (expect > 0.0)
        chi2 += (table(r, c) - expect) * (table(r, c) - expect) / expect;
    }
  CHECK(chi2 < 27.877);
}

TEST_CASE("frechet tail axis") {
  IntensityMeasure mu;
  mu.lambda = 1.0;
  mu.axes.assign(1, AxisLaw{});
  mu.axes[0].kind = AxisLaw::kFrechetTail;
  mu.axes[0].alpha = 2.0;
  Window w = interval(1.0, std::numeric_limits<double>::infinity());
  CHECK(mu.mass(w) == Approx(1.0));
  CHECK(mu.mass(interval(1.0, 2.0)) == Approx(1.0 - 0.25));
  CHECK_THROWS(mu.mass(interval(0.0, 1.0)));  // infinite near 0

  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    double z = mu.axes[0].sample(1.0, 2.0, rng);
    CHECK(z >= 1.0);
    CHECK(z <= 2.0);
  }
}

TEST_CASE("serialization round trips atoms") {
  IntensityMeasure mu = lebesgue_1d(2.0);
  Window w = interval(0.0, 1.0);
  PointConfig pc = sample_poisson(mu, w, 12);
  std::string csv = to_csv(pc);
  size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == pc.atoms.size());
  std::string js = to_json(pc);
  CHECK(js.find("\"seed\":12") != std::string::npos);
}
