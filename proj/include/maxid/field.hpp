#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxid/integrator.hpp"
#include "maxid/spectral.hpp"

namespace maxid {

// One simulated realization of {X(t)} on a finite index grid, with the
// truncation evidence for the window it was sampled on.
struct FieldRealization {
  std::string model_kind;
  std::vector<VectorXd> grid;
  std::vector<double> values;
  Window window;
  std::uint64_t seed = 0;
  double error_budget = 0.0;
  TruncationCertificate truncation;  // empty when only a budget is certified
  bool has_certificate = false;
};

FieldRealization simulate_field(const SpectralModel& model,
                                const std::vector<VectorXd>& grid,
                                std::uint64_t seed, double error_budget);

// Uniform 2-D raster grid of size n x n with spacing h, centered at 0.
std::vector<VectorXd> raster_grid(int n, double h);

}  // namespace maxid
