#pragma once

#include <vector>

namespace maxid {

// Deterministic storm shape F on R (radial in |t| for R^d use).  Each shape
// has closed-form level-set radii so tail masses stay exact.
struct StormProfile {
  enum Shape { kExpBump, kIndicator, kTable } shape = kExpBump;
  double height = 1.0;  // h
  double scale = 1.0;   // s

  // kTable: piecewise-linear profile on a symmetric grid |t| = table_t[i],
  // nonincreasing in |t|.
  std::vector<double> table_t;
  std::vector<double> table_v;

  void validate() const;

  double eval(double t) const;

  // Radius r such that {t : F(t) >= a} = [-r, r]; 0 if a > max F.
  double level_radius(double a) const;

  // Integral over R of F(t)^alpha (closed form except kTable: quadrature
  // on the grid).
  double alpha_integral(double alpha) const;

  // Integral of F(t)^alpha over {|t| > r0}.
  double alpha_tail_integral(double alpha, double r0) const;

  double max_height() const { return height; }
};

// d-dimensional Lebesgue measure of the radius-r ball.
double ball_volume(int d, double r);

// Measure of the union of intervals [c_i - r_i, c_i + r_i].
double interval_union_measure(std::vector<std::pair<double, double>> iv);

}  // namespace maxid
