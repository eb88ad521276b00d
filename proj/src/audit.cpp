#include "maxid/audit.hpp"

#include <cmath>

namespace maxid {

namespace {

constexpr double kNumericTol = 1e-9;

StepFunction random_step(Rng& rng, double value_span) {
  StepFunction f;
  int cells = 1 + static_cast<int>(rng.uniform() * 4.0);
  for (int i = 0; i < cells; ++i) {
    f.mass.push_back(rng.uniform(0.05, 1.5));
    f.value.push_back(rng.uniform(-value_span, value_span));
  }
  return f;
}

void record(AuditResult& out, double margin) {
  out.margins.push_back(margin);
  if (margin < 0.0) ++out.violations;
}

}  // namespace

AuditResult audit_gamma_bound(int trials, std::uint64_t seed) {
  AuditResult out;
  out.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::derive(seed, "audit_gamma", trial);
    StepPair p;
    int cells = 1 + static_cast<int>(rng.uniform() * 4.0);
    for (int i = 0; i < cells; ++i) {
      p.mass.push_back(rng.uniform(0.05, 1.5));
      p.f.push_back(rng.uniform(-2.5, 2.5));
      p.g.push_back(rng.uniform(-2.5, 2.5));
    }
    StepPair f_only{p.mass, p.f, std::vector<double>(p.f.size(), 0.0)};
    StepPair g_only{p.mass, p.g, std::vector<double>(p.g.size(), 0.0)};
    StepPair sum{p.mass, p.f, std::vector<double>(p.f.size(), 0.0)};
    for (size_t i = 0; i < sum.f.size(); ++i) sum.f[i] += p.g[i];
    double dfg = metric_d(sum);  // d(f+g, 0)
    double df = metric_d(f_only), dg = metric_d(g_only);
    double bound = 3.0 * dfg * dfg + 2.0 * (df + dg) * dfg + kNumericTol;
    record(out, bound - std::abs(gamma_defect(p)));
  }
  return out;
}

AuditResult audit_kyfan_upper(int trials, int replicates, std::uint64_t seed) {
  AuditResult out;
  out.trials = trials;
  std::vector<double> samples(replicates), zeros(replicates, 0.0);
  for (int trial = 0; trial < trials; ++trial) {
    Rng gen = Rng::derive(seed, "audit_kfu_f", trial);
    StepFunction f = random_step(gen, 2.0);
    Rng rng = Rng::derive(seed, "audit_kfu_rep", trial);
    for (int r = 0; r < replicates; ++r)
      samples[r] = step_sum_integral_sample(f, rng);
    double emp = ky_fan(samples, zeros);
    double d = metric_d(f);
    double mc_margin = 1.5 / std::sqrt(static_cast<double>(replicates));
    record(out, 2.0 * std::pow(d, 2.0 / 3.0) + mc_margin - emp);
  }
  return out;
}

AuditResult audit_kyfan_lower(int trials, int replicates, std::uint64_t seed) {
  const double c = 1.0 - std::sin(1.0);
  AuditResult out;
  out.trials = trials;
  std::vector<double> xs(replicates), ys(replicates);
  for (int trial = 0; trial < trials; ++trial) {
    Rng gen = Rng::derive(seed, "audit_kfl_f", trial);
    StepFunction f = random_step(gen, 2.0);
    Rng rng = Rng::derive(seed, "audit_kfl_rep", trial);
    for (int r = 0; r < replicates; ++r) {
      xs[r] = step_sum_integral_sample(f, rng);
      ys[r] = step_sum_integral_sample(f, rng);
    }
    double emp = ky_fan(xs, ys);
    double d = metric_d(f);
    double lhs = 1.0 - std::exp(-c * d * d);
    double mc_margin = 3.0 / std::sqrt(static_cast<double>(replicates));
    record(out, 2.0 * emp + mc_margin - lhs);
  }
  return out;
}

}  // namespace maxid
