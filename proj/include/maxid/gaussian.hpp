#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "maxid/rng.hpp"

namespace maxid {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

struct FbmParams {
  double hurst = 0.5;   // H in (0,1]
  double sigma2 = 1.0;  // scale sigma^2

  void validate() const;
};

// Gaussian storm path: k values per node for Brownian motion in R^k,
// one value per node for the scalar fBm field.
struct GaussianPath {
  std::vector<VectorXd> grid;  // index points (1-D times or 2-D nodes)
  MatrixXd values;             // grid.size() rows, k columns
  std::uint64_t seed = 0;
};

// Independent-increment Brownian path in R^k on sorted times containing 0.
GaussianPath brownian_path(int k, const std::vector<double>& times,
                           std::uint64_t seed);

// Same construction drawing from an existing stream; rows are times,
// columns are the k coordinates.
MatrixXd brownian_values(int k, const std::vector<double>& times, Rng& rng);

// Dense covariance factorization of the isotropic fBm field on a fixed
// 2-D grid; reused across draws.  The origin node (if present) is pinned
// to 0 exactly and excluded from the factorization.
class FbmFieldSampler {
 public:
  static constexpr int kDefaultNodeGuard = 4096;

  FbmFieldSampler(const FbmParams& params, std::vector<Vector2d> grid,
                  int node_guard = kDefaultNodeGuard);

  GaussianPath draw(std::uint64_t seed) const;
  VectorXd draw_values(Rng& rng) const;  // flat vector, one value per node

  const std::vector<Vector2d>& grid() const { return grid_; }
  const FbmParams& params() const { return params_; }

  // sigma^2/2 (|t|^{2H} + |s|^{2H} - |t-s|^{2H})
  static double covariance(const FbmParams& p, const Vector2d& t,
                           const Vector2d& s);

 private:
  FbmParams params_;
  std::vector<Vector2d> grid_;
  MatrixXd factor_;          // lower-triangular, free nodes only
  std::vector<int> free_;    // node index per factor row
};

GaussianPath fbm_field_2d(const FbmParams& params,
                          const std::vector<Vector2d>& grid,
                          std::uint64_t seed,
                          int node_guard = FbmFieldSampler::kDefaultNodeGuard);

}  // namespace maxid
