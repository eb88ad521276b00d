#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "maxid/rng.hpp"

namespace maxid {

using Eigen::VectorXd;

// Tabulated tail-mass law: mass([x,inf)) interpolated linearly between
// knots; the iid model stores -log F(x) here.
struct TailTable {
  std::vector<double> x;  // increasing
  std::vector<double> m;  // nonincreasing tail masses, m.back() == 0

  void validate() const;
  double mass_above(double x0) const;
  double inverse_mass(double m0) const;  // x with mass_above(x) == m0
};

// Per-axis coordinate law of the product intensity measure.  Lebesgue axes
// carry the (constant) base density through the global lambda factor;
// a Frechet tail axis carries the density alpha z^{-(alpha+1)} dz.
struct AxisLaw {
  enum Kind {
    kLebesgue,
    kFrechetTail,       // alpha z^{-(alpha+1)} dz on z > 0
    kTailTable,         // tabulated tail mass
    kWeightedDiscrete,  // atoms at 0..n-1 with the given weights
  } kind = kLebesgue;
  double alpha = 1.0;  // Frechet tail exponent
  std::shared_ptr<const TailTable> table;
  std::vector<double> weights;

  // Mass of the axis restricted to [lo, hi] (hi may be +inf for Frechet).
  double mass(double lo, double hi) const;
  double sample(double lo, double hi, Rng& rng) const;
};

// Optional probability-law mark appended to every atom (mass factor 1).
// Used for storm paths: the sampler receives its own derived stream.
struct MarkSampler {
  std::string name;
  std::function<VectorXd(Rng&)> draw;
};

// Axis-aligned restriction window over the continuous coordinates of the
// product domain, plus a label for the mark component.
struct Window {
  VectorXd lower;
  VectorXd upper;  // entries may be +inf on Frechet tail axes
  std::string mark_descriptor = "none";

  int dim() const { return static_cast<int>(lower.size()); }
  void validate() const;
  bool contains(const VectorXd& x) const;
  bool same_as(const Window& other) const;
};

struct Atom {
  VectorXd loc;   // one entry per window axis
  VectorXd mark;  // empty unless the intensity carries a mark sampler
};

struct PointConfig {
  std::vector<Atom> atoms;
  Window window;
  std::uint64_t seed = 0;
};

// Sigma-finite intensity on the product domain: constant base density
// `lambda` times the per-axis laws, times an optional probability mark.
struct IntensityMeasure {
  double lambda = 1.0;
  std::vector<AxisLaw> axes;
  std::shared_ptr<const MarkSampler> mark;  // may be null

  double mass(const Window& w) const;
};

PointConfig sample_poisson(const IntensityMeasure& intensity, const Window& w,
                           std::uint64_t seed);

PointConfig thin(const PointConfig& config, double keep_prob,
                 std::uint64_t seed);

// Complement of thin(): the atoms discarded at the same (keep_prob, seed).
PointConfig thin_complement(const PointConfig& config, double keep_prob,
                            std::uint64_t seed);

PointConfig superpose(const std::vector<PointConfig>& configs);

std::string to_csv(const PointConfig& config);
std::string to_json(const PointConfig& config);

}  // namespace maxid
