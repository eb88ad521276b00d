#include "maxid/field.hpp"

#include <cmath>
#include <stdexcept>

namespace maxid {

FieldRealization simulate_field(const SpectralModel& model,
                                const std::vector<VectorXd>& grid,
                                std::uint64_t seed, double error_budget) {
  if (grid.empty()) throw std::invalid_argument("simulate: empty grid");
  if (!(error_budget > 0.0 && error_budget < 1.0))
    throw std::invalid_argument("simulate: error budget must be in (0,1)");

  VectorXd lo = grid.front(), hi = grid.front();
  for (const VectorXd& t : grid) {
    lo = lo.cwiseMin(t);
    hi = hi.cwiseMax(t);
  }
  FieldRealization field;
  field.model_kind = model.kind();
  field.grid = grid;
  field.seed = seed;
  field.error_budget = error_budget;
  field.window = model.window_for(lo, hi, error_budget);

  PointConfig config = sample_poisson(model.intensity(), field.window, seed);
  field.values.reserve(grid.size());
  for (const VectorXd& t : grid) {
    double v = max_integral(model, t, config);
    if (!std::isfinite(v))
      throw std::runtime_error(
          "simulate: empty configuration for a min-oriented model; "
          "shrink the error budget to enlarge the window");
    field.values.push_back(v);
  }

  try {
    double xb = model.margin_quantile(grid.front(), error_budget);
    field.truncation =
        tail_certificate(model, grid.front(), field.window, {xb});
    field.has_certificate = true;
  } catch (const std::exception&) {
    field.has_certificate = false;  // budget-only certification
  }
  return field;
}

std::vector<VectorXd> raster_grid(int n, double h) {
  if (n < 1 || !(h > 0.0))
    throw std::invalid_argument("raster grid: need n >= 1, h > 0");
  std::vector<VectorXd> grid;
  grid.reserve(static_cast<size_t>(n) * n);
  // anchored so the grid contains the origin exactly
  int c = n / 2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      VectorXd t(2);
      t << (j - c) * h, (i - c) * h;
      grid.push_back(t);
    }
  return grid;
}

}  // namespace maxid
