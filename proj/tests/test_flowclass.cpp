#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "maxid/flowclass.hpp"

using namespace maxid;
using doctest::Approx;

namespace {

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

GrainSet unit_disk() {
  GrainSet g;
  g.shape = GrainSet::kDisk;
  g.radius = 1.0;
  g.dim = 2;
  return g;
}

}  // namespace

TEST_CASE("flow configuration validates") {
  FlowClassConfig c;
  c.radii = {4.0, 2.0};
  CHECK_THROWS(c.validate());
  c.radii = {2.0};
  CHECK_THROWS(c.validate());
  c.radii = {2.0, 4.0};
  c.samples = 0;
  CHECK_THROWS(c.validate());
  c.samples = 10;
  c.divergence_ratio = 1.0;
  CHECK_THROWS(c.validate());
  c.divergence_ratio = 4.0;
  c.grid_step = 0.0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("growth curves are monotone in the radius") {
  ModelPtr m = make_moving_maxima(exp_storm(1.0, 1.0), 1.0, 1);
  FlowClassConfig c;
  c.radii = {1.0, 2.0, 4.0, 8.0};
  c.samples = 40;
  c.grid_step = 0.02;
  c.seed = 5;
  FlowClassReport r = classify(*m, c);
  REQUIRE(r.growth.rows() == 40);
  REQUIRE(r.growth.cols() == 4);
  for (int i = 0; i < r.growth.rows(); ++i)
    for (int j = 1; j < r.growth.cols(); ++j)
      CHECK(r.growth(i, j) >= r.growth(i, j - 1));
}

TEST_CASE("compactly decaying storms are dissipative") {
  ModelPtr m = make_moving_maxima(exp_storm(1.0, 1.0), 1.0, 1);
  FlowClassConfig c;
  c.radii = {2.0, 4.0, 8.0, 16.0};
  c.samples = 100;
  c.grid_step = 0.02;
  c.seed = 9;
  FlowClassReport r = classify(*m, c);
  CHECK(r.verdict == "dissipative");
  CHECK(r.diverging_fraction <= 0.05);
  CHECK(r.psi_name == PsiSpec{PsiSpec::kTruncSquare}.name());
}

TEST_CASE("line storms grow linearly and are conservative") {
  ModelPtr m = make_poisson_line(exp_storm(1.0, 1.0), 1.0);
  FlowClassConfig c;
  c.radii = {1.0, 2.0, 4.0, 8.0};
  c.samples = 60;
  c.grid_step = 0.05;
  c.seed = 13;
  FlowClassReport r = classify(*m, c);
  CHECK(r.verdict == "conservative");
  CHECK(r.diverging_fraction >= 0.95);
}

TEST_CASE("bounded grains are dissipative") {
  ModelPtr m = make_boolean(unit_disk(), 1.0, 2);
  FlowClassConfig c;
  c.radii = {2.0, 4.0, 8.0};
  c.samples = 50;
  c.grid_step = 0.05;
  c.seed = 17;
  FlowClassReport r = classify(*m, c);
  CHECK(r.verdict == "dissipative");
}

TEST_CASE("the verdict is stable under psi swaps and ratio changes") {
  ModelPtr mm = make_moving_maxima(exp_storm(1.0, 1.0), 1.0, 1);
  ModelPtr line = make_poisson_line(exp_storm(1.0, 1.0), 1.0);
  for (double ratio : {2.0, 4.0, 8.0}) {
    FlowClassConfig c;
    c.radii = {1.0, 2.0, 4.0, 8.0, 16.0};
    c.samples = 50;
    c.grid_step = 0.05;
    c.divergence_ratio = ratio;
    c.seed = 21;
    CHECK(classify(*mm, c).verdict == "dissipative");

    FlowClassConfig cl = c;
    cl.use_model_psi = false;
    cl.psi = PsiSpec{PsiSpec::kInvExp};
    CHECK(classify(*mm, cl).verdict == "dissipative");
    CHECK(classify(*line, cl).verdict == "conservative");
  }
}

TEST_CASE("nearest-point fields in one dimension are conservative") {
  PenroseSpec spec;
  spec.k = 1;
  spec.lambda = 1.0;
  std::vector<VectorXd> grid = {pt(0.0)};
  ModelPtr m = make_penrose(spec, grid);
  FlowClassConfig c;
  c.radii = {2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0};
  c.samples = 60;
  c.grid_step = 0.05;
  c.seed = 25;
  FlowClassReport r = classify(*m, c);
  CHECK(r.diverging_fraction > 0.8);
  CHECK(r.verdict != "dissipative");
}

TEST_CASE("a non-decaying psi is rejected by the admissibility probe") {
  PenroseSpec spec;
  spec.k = 1;
  spec.lambda = 1.0;
  std::vector<VectorXd> grid = {pt(0.0)};
  ModelPtr m = make_penrose(spec, grid);
  FlowClassConfig c;
  c.radii = {2.0, 4.0};
  c.samples = 5;
  c.use_model_psi = false;
  c.psi = PsiSpec{PsiSpec::kTruncSquare};
  CHECK_THROWS_WITH(classify(*m, c), "psi not admissible");
}

TEST_CASE("non-stationary models cannot be classified") {
  ModelPtr m = make_iid({0.5, 1.0, 2.0}, {0.3, 0.7, 1.0}, 2);
  FlowClassConfig c;
  CHECK_THROWS(classify(*m, c));
}

TEST_CASE("higher index dimensions are rejected") {
  ModelPtr m = make_moving_maxima(exp_storm(1.0, 1.0), 1.0, 3);
  FlowClassConfig c;
  c.samples = 2;
  CHECK_THROWS(classify(*m, c));
}

TEST_CASE("split fields recombine to the full field") {
  ModelPtr m = make_boolean(unit_disk(), 1.0, 2);
  FlowClassConfig c;
  c.radii = {2.0, 4.0, 8.0};
  c.grid_step = 0.05;
  std::vector<VectorXd> grid = {pt2(0.0, 0.0), pt2(0.3, -0.2),
                                pt2(-0.5, 0.5)};
  SplitFields s = cd_split_simulate(*m, c, grid, 33);
  REQUIRE(s.full.size() == grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(s.full[i] ==
          std::max(s.conservative_part[i], s.dissipative_part[i]));
    // every grain trajectory settles: nothing lands in the diverging part
    CHECK(s.conservative_part[i] == 0.0);
    CHECK(s.dissipative_part[i] == s.full[i]);
  }
  CHECK(s.undecided_fraction == 0.0);
}

TEST_CASE("line configurations land entirely in the diverging part") {
  ModelPtr m = make_poisson_line(exp_storm(1.0, 1.0), 1.0);
  FlowClassConfig c;
  c.radii = {1.0, 2.0, 4.0, 8.0, 16.0};
  c.grid_step = 0.05;
  std::vector<VectorXd> grid = {pt2(0.0, 0.0)};
  SplitFields s = cd_split_simulate(*m, c, grid, 41);
  CHECK(s.full[0] == s.conservative_part[0]);
  CHECK(s.dissipative_part[0] == 0.0);
  CHECK(s.undecided_fraction == 0.0);
}

TEST_CASE("decaying storms land entirely in the settled part") {
  ModelPtr m = make_moving_maxima(exp_storm(1.0, 1.0), 1.0, 1);
  FlowClassConfig c;
  c.radii = {8.0, 16.0, 32.0};
  c.grid_step = 0.02;
  std::vector<VectorXd> grid = {pt(0.0), pt(1.0)};
  SplitFields s = cd_split_simulate(*m, c, grid, 49);
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(s.conservative_part[i] == 0.0);
    CHECK(s.dissipative_part[i] == s.full[i]);
  }
}
