#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "maxid/gaussian.hpp"
#include "maxid/point_process.hpp"
#include "maxid/storm.hpp"
#include "maxid/types.hpp"

namespace maxid {

enum class Orientation { kMax, kMin };

// Fixed grain of the Boolean model, centered at the origin.
struct GrainSet {
  enum Shape { kBox, kDisk } shape = kDisk;
  VectorXd half_widths;  // kBox: per-axis half widths
  double radius = 1.0;   // kDisk
  int dim = 2;

  void validate() const;
  double measure() const;
  bool contains(const VectorXd& x) const;  // x relative to the grain center
  double circumradius() const;
};

// A spectral family {f_t}: evaluation on atoms, the intensity measure the
// atoms are drawn from, window recipes with truncation budgets, and the
// level-set mass oracles that make distribution checks exact.
class SpectralModel {
 public:
  virtual ~SpectralModel() = default;

  virtual std::string kind() const = 0;
  virtual int index_dim() const = 0;
  virtual Orientation orientation() const { return Orientation::kMax; }
  virtual bool stationary() const { return true; }

  const IntensityMeasure& intensity() const { return intensity_; }

  virtual double eval(const VectorXd& t, const Atom& atom) const = 0;

  // Restriction window covering the index box [t_lo, t_hi] so that the
  // off-window truncation error stays within `budget` (a probability).
  virtual Window window_for(const VectorXd& t_lo, const VectorXd& t_hi,
                            double budget) const = 0;

  // mu{f_t >= a}; throws "tail mass unavailable" when no oracle exists.
  virtual double level_mass(const VectorXd& t, double a) const;

  // mu({f_t >= a} outside the window).
  virtual double tail_mass(const VectorXd& t, double a,
                           const Window& w) const;
  virtual bool tail_is_envelope() const { return false; }

  // mu(union_j {f_{t_j} >= x_j}); closed form where the model has one,
  // otherwise Monte Carlo indicator integration over a dominating window.
  virtual double union_mass(const std::vector<VectorXd>& ts,
                            const std::vector<double>& xs,
                            const QuadratureSpec& quad,
                            double* std_error = nullptr) const;

  // Coordinate action T_s with f_{t+s} = f_t o T_s for stationary kinds.
  virtual Atom shift_atom(const Atom& atom, const VectorXd& s) const;

  // --- flow-classification support -------------------------------------
  // Finite-mass core of Omega from which test atoms are drawn, and the
  // |f_t| trajectory of one sampled core atom (exact at the given grid).
  virtual double core_mass() const;
  virtual std::function<double(const VectorXd&)> sample_core_trajectory(
      Rng& rng, const std::vector<VectorXd>& tgrid) const;
  virtual PsiSpec default_psi() const { return PsiSpec{}; }
  virtual PsiSpec alternate_psi() const;

  // Margin helpers built on level_mass.
  double margin_cdf(const VectorXd& t, double x) const;
  double margin_quantile(const VectorXd& t, double p) const;

 protected:
  IntensityMeasure intensity_;
};

using ModelPtr = std::shared_ptr<const SpectralModel>;

// Independent coordinates: f_t(s,x) = x 1{t=s}, intensity
// mu({t} x [x,inf)) = -log P[X(t) < x] from a tabulated marginal CDF.
ModelPtr make_iid(const std::vector<double>& cdf_x,
                  const std::vector<double>& cdf_p, int index_count);

ModelPtr make_moving_maxima(const StormProfile& storm, double lambda, int d);

ModelPtr make_poisson_line(const StormProfile& storm, double lambda);

ModelPtr make_poisson_line_maxstable(const StormProfile& storm, double lambda,
                                     double alpha);

struct PenroseSpec {
  enum StormKind { kBrownian, kFbmField } storm_kind = kBrownian;
  int k = 1;          // ambient dimension of the Poisson points (kBrownian)
  FbmParams fbm;      // kFbmField (k = 1, index dimension 2)
  double lambda = 1.0;
  int fbm_node_guard = FbmFieldSampler::kDefaultNodeGuard;
};

// Penrose min-i.d. field on a fixed finite index grid; storm paths are
// sampled once per atom on that grid.
ModelPtr make_penrose(const PenroseSpec& spec,
                      const std::vector<VectorXd>& grid);

ModelPtr make_boolean(const GrainSet& grain, double lambda, int d);

// Max-stable lift: f_t(u, j) = u g_t(j) over a finite base space with
// masses `base_mass`; G(t, j) holds g_t(j).
ModelPtr make_frechet_lift(const Eigen::MatrixXd& G,
                           const VectorXd& base_mass, double alpha);

}  // namespace maxid
