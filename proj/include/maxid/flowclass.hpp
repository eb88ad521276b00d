#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxid/spectral.hpp"

namespace maxid {

// Empirical conservative/dissipative probe: growth of
// S_R(omega) = int_{[-R,R]^d} psi(|f_t(omega)|) dt over expanding R.
struct FlowClassConfig {
  PsiSpec psi;                     // default taken from the model
  bool use_model_psi = true;
  std::vector<double> radii = {2, 4, 8, 16, 32, 64, 128};
  int samples = 200;               // sampled core atoms (omega)
  double divergence_ratio = 4.0;
  double grid_step = 0.02;         // t-quadrature step per axis unit R_1
  std::uint64_t seed = 0;

  void validate() const;
};

struct FlowClassReport {
  std::string verdict;             // conservative | dissipative | undecided
  std::string psi_name;
  std::vector<double> radii;
  Eigen::MatrixXd growth;          // samples x radii, S_R per omega
  double diverging_fraction = 0.0;
  std::vector<int> labels;         // per omega: 1 = C (diverging), 0 = D
};

FlowClassReport classify(const SpectralModel& model,
                         const FlowClassConfig& config);

// Simulate the same point configuration twice, restricted to the atoms
// empirically labeled conservative resp. dissipative; the pointwise
// combination of the two halves reconstructs the full field exactly.
struct SplitFields {
  std::vector<double> full;
  std::vector<double> conservative_part;
  std::vector<double> dissipative_part;
  double undecided_fraction = 0.0;
};

SplitFields cd_split_simulate(const SpectralModel& model,
                              const FlowClassConfig& config,
                              const std::vector<VectorXd>& grid,
                              std::uint64_t seed);

}  // namespace maxid
