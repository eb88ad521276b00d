#include "maxid/gaussian.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maxid {

void FbmParams::validate() const {
  if (!(hurst > 0.0 && hurst <= 1.0))
    throw std::invalid_argument("fbm: H must be in (0,1]");
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("fbm: sigma2 must be positive");
}

MatrixXd brownian_values(int k, const std::vector<double>& times, Rng& rng) {
  if (k < 1) throw std::invalid_argument("brownian_path: k must be >= 1");
  if (times.empty()) throw std::invalid_argument("brownian_path: empty grid");
  bool has_zero = false;
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] == 0.0) has_zero = true;
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("brownian_path: times must be sorted");
  }
  if (!has_zero)
    throw std::invalid_argument("brownian_path: times must contain 0");

  MatrixXd values =
      MatrixXd::Zero(static_cast<Eigen::Index>(times.size()), k);
  size_t i0 = static_cast<size_t>(
      std::lower_bound(times.begin(), times.end(), 0.0) - times.begin());
  // forward arm from 0, then backward arm (independent increments)
  for (size_t i = i0 + 1; i < times.size(); ++i) {
    double sd = std::sqrt(times[i] - times[i - 1]);
    for (int c = 0; c < k; ++c)
      values(static_cast<Eigen::Index>(i), c) =
          values(static_cast<Eigen::Index>(i - 1), c) + sd * rng.normal();
  }
  for (size_t i = i0; i-- > 0;) {
    double sd = std::sqrt(times[i + 1] - times[i]);
    for (int c = 0; c < k; ++c)
      values(static_cast<Eigen::Index>(i), c) =
          values(static_cast<Eigen::Index>(i + 1), c) + sd * rng.normal();
  }
  return values;
}

GaussianPath brownian_path(int k, const std::vector<double>& times,
                           std::uint64_t seed) {
  Rng rng = Rng::derive(seed, "brownian_path");
  GaussianPath out;
  out.seed = seed;
  out.grid.reserve(times.size());
  for (double t : times) out.grid.push_back(VectorXd::Constant(1, t));
  out.values = brownian_values(k, times, rng);
  return out;
}

double FbmFieldSampler::covariance(const FbmParams& p, const Vector2d& t,
                                   const Vector2d& s) {
  double h2 = 2.0 * p.hurst;
  return 0.5 * p.sigma2 *
         (std::pow(t.norm(), h2) + std::pow(s.norm(), h2) -
          std::pow((t - s).norm(), h2));
}

FbmFieldSampler::FbmFieldSampler(const FbmParams& params,
                                 std::vector<Vector2d> grid, int node_guard)
    : params_(params), grid_(std::move(grid)) {
  params_.validate();
  if (static_cast<int>(grid_.size()) > node_guard)
    throw std::invalid_argument(
        "fbm grid too large for dense factorization (guard " +
        std::to_string(node_guard) + " nodes)");
  bool has_origin = false;
  for (size_t i = 0; i < grid_.size(); ++i) {
    if (grid_[i].norm() == 0.0)
      has_origin = true;
    else
      free_.push_back(static_cast<int>(i));
  }
  if (!has_origin)
    throw std::invalid_argument("fbm grid must contain the origin");

  const Eigen::Index n = static_cast<Eigen::Index>(free_.size());
  MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      cov(i, j) = cov(j, i) =
          covariance(params_, grid_[free_[i]], grid_[free_[j]]);

  // escalating diagonal jitter, capped at 1e-10 * trace/n; the matrix is
  // factored in place (draws only touch the lower triangle) to keep the
  // peak at two n x n buffers
  double base = cov.trace() / static_cast<double>(n);
  for (double jitter : {0.0, 1e-14, 1e-12, 1e-10}) {
    factor_ = cov;
    if (jitter > 0.0) factor_.diagonal().array() += jitter * base;
    Eigen::LLT<Eigen::Ref<MatrixXd>> llt(factor_);
    if (llt.info() == Eigen::Success) return;
  }
  throw std::runtime_error("fbm covariance not PSD after jitter");
}

VectorXd FbmFieldSampler::draw_values(Rng& rng) const {
  VectorXd z(factor_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  VectorXd fv = factor_.triangularView<Eigen::Lower>() * z;
  VectorXd out = VectorXd::Zero(static_cast<Eigen::Index>(grid_.size()));
  for (size_t i = 0; i < free_.size(); ++i)
    out[free_[i]] = fv[static_cast<Eigen::Index>(i)];
  return out;
}

GaussianPath FbmFieldSampler::draw(std::uint64_t seed) const {
  Rng rng = Rng::derive(seed, "fbm_field");
  GaussianPath out;
  out.seed = seed;
  out.grid.reserve(grid_.size());
  for (const Vector2d& t : grid_) out.grid.push_back(VectorXd(t));
  out.values = draw_values(rng);
  return out;
}

GaussianPath fbm_field_2d(const FbmParams& params,
                          const std::vector<Vector2d>& grid,
                          std::uint64_t seed, int node_guard) {
  FbmFieldSampler sampler(params, grid, node_guard);
  return sampler.draw(seed);
}

}  // namespace maxid
