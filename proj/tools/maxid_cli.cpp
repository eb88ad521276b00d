#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "maxid/audit.hpp"
#include "maxid/config.hpp"
#include "maxid/exactdist.hpp"
#include "maxid/field.hpp"
#include "maxid/flowclass.hpp"
#include "maxid/io.hpp"
#include "maxid/stats.hpp"

namespace {

using maxid::json;
using maxid::VectorXd;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MAXID_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 0;
}

void write_report(const std::string& path, json report, bool pass) {
  report["schema"] = 1;
  report["pass"] = pass;
  maxid::write_text_file(path, report.dump(2) + "\n");
}

json window_to_json(const maxid::Window& w) {
  json j;
  j["lower"] = std::vector<double>(w.lower.begin(), w.lower.end());
  j["upper"] = std::vector<double>(w.upper.begin(), w.upper.end());
  if (!w.mark_descriptor.empty()) j["mark"] = w.mark_descriptor;
  return j;
}

std::vector<VectorXd> points_from_json(const json& arr) {
  std::vector<VectorXd> pts;
  for (const auto& p : arr) {
    auto v = p.get<std::vector<double>>();
    pts.push_back(Eigen::Map<VectorXd>(v.data(),
                                       static_cast<Eigen::Index>(v.size())));
  }
  return pts;
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed,
                 double budget, const std::string& out,
                 const std::string& report_path) {
  json cfg = maxid::load_config_file(config_path);
  json grid_cfg = cfg.value(
      "grid", json{{"dim", 1}, {"lo", -1.0}, {"hi", 1.0}, {"n", 64}});
  std::vector<VectorXd> grid = maxid::grid_from_json(grid_cfg);
  maxid::ModelPtr model = maxid::model_from_json(cfg.at("model"), grid);
  maxid::FieldRealization field =
      maxid::simulate_field(*model, grid, seed, budget);

  if (out.ends_with(".csv")) {
    maxid::write_field_csv(field, out);
  } else if (out.ends_with(".pgm")) {
    int n = static_cast<int>(grid_cfg.value("n", 64));
    if (static_cast<size_t>(n) * n != field.values.size())
      throw std::runtime_error("pgm output needs a square 2-D grid");
    maxid::write_pgm(field.values, n, n, out);
  } else if (out.ends_with(".json")) {
    json j;
    j["schema"] = 1;
    j["model"] = field.model_kind;
    j["seed"] = field.seed;
    j["values"] = field.values;
    j["window"] = window_to_json(field.window);
    maxid::write_text_file(out, j.dump(2) + "\n");
  } else {
    throw std::runtime_error("unknown output format: " + out);
  }

  json report;
  report["command"] = "simulate";
  report["model"] = field.model_kind;
  report["seed"] = seed;
  report["error_budget"] = budget;
  report["points"] = field.values.size();
  report["window"] = window_to_json(field.window);
  report["output"] = out;
  if (field.has_certificate) {
    report["certificate"] = {{"thresholds", field.truncation.thresholds},
                             {"exceed_prob", field.truncation.exceed_prob},
                             {"envelope", field.truncation.envelope}};
  }
  write_report(report_path, report, true);
  return 0;
}

int cmd_figure1(std::uint64_t seed, int size, double spacing,
                const std::string& out_dir, const std::string& report_path) {
  std::vector<double> hursts = {0.1, 0.5, 0.9};
  std::vector<std::string> files;
  std::vector<double> roughness;
  std::vector<VectorXd> grid = maxid::raster_grid(size, spacing);
  for (double h : hursts) {
    maxid::PenroseSpec spec;
    spec.storm_kind = maxid::PenroseSpec::kFbmField;
    spec.fbm.hurst = h;
    spec.fbm.sigma2 = 1.0;
    spec.lambda = 1.0;
    spec.fbm_node_guard = size * size;
    maxid::ModelPtr model = maxid::make_penrose(spec, grid);
    maxid::FieldRealization field =
        maxid::simulate_field(*model, grid, seed, 1e-3);

    // mean absolute horizontal neighbor difference, a roughness proxy
    double acc = 0.0;
    long cnt = 0;
    for (int r = 0; r < size; ++r)
      for (int c = 0; c + 1 < size; ++c) {
        acc += std::abs(field.values[r * size + c + 1] -
                        field.values[r * size + c]);
        ++cnt;
      }
    roughness.push_back(acc / cnt);

    std::ostringstream name;
    name << out_dir << "/figure1_h" << static_cast<int>(h * 10 + 0.5)
         << ".pgm";
    maxid::write_pgm(field.values, size, size, name.str());
    files.push_back(name.str());
  }
  bool smooth_ordered =
      roughness[0] > roughness[1] && roughness[1] > roughness[2];
  json report;
  report["command"] = "figure1";
  report["seed"] = seed;
  report["size"] = size;
  report["spacing"] = spacing;
  report["hurst"] = hursts;
  report["files"] = files;
  report["mean_abs_neighbor_diff"] = roughness;
  report["smoothness_ordered"] = smooth_ordered;
  write_report(report_path, report, smooth_ordered);
  return smooth_ordered ? 0 : 1;
}

int cmd_metrics_audit(int trials, int replicates, std::uint64_t seed,
                      const std::string& report_path) {
  maxid::AuditResult gamma = maxid::audit_gamma_bound(trials, seed);
  maxid::AuditResult upper = maxid::audit_kyfan_upper(trials, replicates, seed);
  maxid::AuditResult lower = maxid::audit_kyfan_lower(trials, replicates, seed);
  bool pass = gamma.violations == 0 && upper.violations == 0 &&
              lower.violations == 0;
  json report;
  report["command"] = "metrics-audit";
  report["seed"] = seed;
  report["trials"] = trials;
  report["replicates"] = replicates;
  report["suites"] = {{{"name", "gamma_bound"},
                       {"violations", gamma.violations},
                       {"margins", gamma.margins}},
                      {{"name", "ky_fan_upper"},
                       {"violations", upper.violations},
                       {"margins", upper.margins}},
                      {{"name", "ky_fan_lower"},
                       {"violations", lower.violations},
                       {"margins", lower.margins}}};
  write_report(report_path, report, pass);
  if (!pass)
    std::cerr << "metrics-audit: violations found (gamma " << gamma.violations
              << ", upper " << upper.violations << ", lower "
              << lower.violations << ")\n";
  return pass ? 0 : 1;
}

int cmd_fdd_check(const std::string& config_path, int replicates,
                  std::uint64_t seed, const maxid::QuadratureSpec& quad,
                  const std::string& report_path) {
  json cfg = maxid::load_config_file(config_path);
  const json& fc = cfg.at("fdd");
  maxid::FddQuery query;
  query.points = points_from_json(fc.at("points"));
  query.thresholds = fc.at("thresholds").get<std::vector<double>>();

  VectorXd lo = query.points.front(), hi = query.points.front();
  for (const VectorXd& t : query.points) {
    lo = lo.cwiseMin(t);
    hi = hi.cwiseMax(t);
  }
  maxid::ModelPtr model = maxid::model_from_json(cfg.at("model"));

  maxid::FddResult exact = maxid::fdd_cdf(*model, query, quad);
  maxid::Window w = model->window_for(lo, hi, 1e-2 / replicates);
  long hits = 0;
  for (int r = 0; r < replicates; ++r) {
    maxid::PointConfig pc = maxid::sample_poisson(model->intensity(), w,
                                                  maxid::Rng::mix(seed) + r);
    bool below = true;
    for (size_t j = 0; j < query.points.size() && below; ++j)
      below = maxid::max_integral(*model, query.points[j], pc) <
              query.thresholds[j];
    hits += below;
  }
  double emp = static_cast<double>(hits) / replicates;
  double sigma = std::sqrt(
      std::max(exact.value * (1.0 - exact.value), 0.25 / replicates) /
      replicates);
  bool pass = std::abs(emp - exact.value) <= 3.0 * sigma + exact.error;

  json report;
  report["command"] = "fdd-check";
  report["seed"] = seed;
  report["query"] = {{"points", fc.at("points")},
                     {"thresholds", query.thresholds}};
  report["exact"] = exact.value;
  report["exact_error"] = exact.error;
  report["empirical"] = emp;
  report["n"] = replicates;
  write_report(report_path, report, pass);
  if (!pass)
    std::cerr << "fdd-check: empirical " << emp << " vs exact " << exact.value
              << " beyond 3 sigma\n";
  return pass ? 0 : 1;
}

// Margin of the field at 0 vs the pointwise max of 4 independent fields at
// a quarter of the intensity; equal in law for max-i.d. fields.
int cmd_maxid_check(const std::string& config_path, int replicates,
                    std::uint64_t seed, double ks_limit,
                    const std::string& report_path) {
  json cfg = maxid::load_config_file(config_path);
  json model_cfg = cfg.at("model");
  if (!model_cfg.contains("lambda"))
    throw std::runtime_error(
        "maxid-check needs a model with an intensity scale (lambda)");
  json quarter_cfg = model_cfg;
  quarter_cfg["lambda"] = model_cfg.at("lambda").get<double>() / 4.0;
  maxid::ModelPtr model = maxid::model_from_json(model_cfg);
  maxid::ModelPtr quarter = maxid::model_from_json(quarter_cfg);

  VectorXd t = VectorXd::Zero(model->index_dim());
  maxid::Window w = model->window_for(t, t, 1e-4);
  std::vector<double> full(replicates), split(replicates);
  for (int r = 0; r < replicates; ++r) {
    maxid::PointConfig pc = maxid::sample_poisson(
        model->intensity(), w, maxid::Rng::derive(seed, "full", r).next_u64());
    full[r] = maxid::max_integral(*model, t, pc);
    double best = 0.0;
    for (int part = 0; part < 4; ++part) {
      maxid::PointConfig qc = maxid::sample_poisson(
          quarter->intensity(), w,
          maxid::Rng::derive(seed, "quarter", 4 * r + part).next_u64());
      best = std::max(best, maxid::max_integral(*quarter, t, qc));
    }
    split[r] = best;
  }
  double ks = maxid::ks_two_sample(full, split);
  bool pass = ks <= ks_limit;

  json report;
  report["command"] = "maxid-check";
  report["model"] = model->kind();
  report["seed"] = seed;
  report["n"] = replicates;
  report["ks"] = ks;
  report["ks_limit"] = ks_limit;
  write_report(report_path, report, pass);
  if (!pass)
    std::cerr << "maxid-check: KS " << ks << " above " << ks_limit << "\n";
  return pass ? 0 : 1;
}

int cmd_classify(const std::string& config_path, std::uint64_t seed,
                 const std::string& curves_path,
                 const std::string& report_path) {
  json cfg = maxid::load_config_file(config_path);
  json cc = cfg.value("classify", json::object());

  maxid::FlowClassConfig fc;
  fc.seed = seed;
  if (cc.contains("radii")) fc.radii = cc.at("radii").get<std::vector<double>>();
  if (cc.contains("samples")) fc.samples = cc.at("samples").get<int>();
  if (cc.contains("divergence_ratio"))
    fc.divergence_ratio = cc.at("divergence_ratio").get<double>();

  // Penrose models evaluate only classification trajectories here, so a
  // minimal origin-only grid suffices.
  std::vector<VectorXd> grid = {VectorXd::Zero(1)};
  maxid::ModelPtr model = maxid::model_from_json(cfg.at("model"), grid);
  maxid::FlowClassReport rep = maxid::classify(*model, fc);

  std::ostringstream curves;
  curves.precision(12);
  curves << "omega";
  for (double r : rep.radii) curves << ",S_" << r;
  curves << "\n";
  for (int i = 0; i < rep.growth.rows(); ++i) {
    curves << i;
    for (int j = 0; j < rep.growth.cols(); ++j)
      curves << "," << rep.growth(i, j);
    curves << "\n";
  }
  maxid::write_text_file(curves_path, curves.str());

  bool pass = rep.verdict != "undecided";
  if (cc.contains("expect"))
    pass = rep.verdict == cc.at("expect").get<std::string>();

  json report;
  report["command"] = "classify";
  report["model"] = model->kind();
  report["seed"] = seed;
  report["psi"] = rep.psi_name;
  report["radii"] = rep.radii;
  report["verdict"] = rep.verdict;
  report["diverging_fraction"] = rep.diverging_fraction;
  report["curves_csv_path"] = curves_path;
  write_report(report_path, report, pass);
  if (!pass)
    std::cerr << "classify: verdict " << rep.verdict << " (diverging fraction "
              << rep.diverging_fraction << ")\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and verification of sum/max infinitely divisible "
               "processes via Poisson spectral representations"};
  app.require_subcommand(1);

  std::uint64_t seed = default_seed();
  std::string config_path, out_path, report_path, curves_path;
  double budget = 1e-3;
  int size = 128;
  double spacing = 0.05;
  int trials = 1000;
  int replicates = 100000;
  double ks_limit = 0.02;
  maxid::QuadratureSpec quad;
  std::string quad_method = "adaptive";

  auto* sim = app.add_subcommand("simulate", "simulate a field on a grid");
  sim->add_option("config", config_path, "model config file")->required();
  sim->add_option("--seed", seed);
  sim->add_option("--error-budget", budget);
  sim->add_option("--out", out_path, "output path (.csv/.pgm/.json)")
      ->required();
  sim->add_option("--report", report_path);

  auto* fig = app.add_subcommand("figure1",
                                 "three Penrose min-i.d. rasters, "
                                 "H in {0.1, 0.5, 0.9}");
  fig->add_option("--seed", seed);
  fig->add_option("--size", size);
  fig->add_option("--spacing", spacing);
  fig->add_option("--out", out_path, "output directory")->required();
  fig->add_option("--report", report_path);

  auto* audit = app.add_subcommand("metrics-audit",
                                   "randomized metric inequality suites");
  audit->add_option("--trials", trials);
  audit->add_option("--replicates", replicates);
  audit->add_option("--seed", seed);
  audit->add_option("--report", report_path);

  auto* fdd = app.add_subcommand("fdd-check",
                                 "empirical vs exact joint CDF");
  fdd->add_option("config", config_path)->required();
  fdd->add_option("--replicates", replicates);
  fdd->add_option("--seed", seed);
  fdd->add_option("--quadrature", quad_method, "mc|adaptive");
  fdd->add_option("--mc-samples", quad.mc_samples);
  fdd->add_option("--tolerance", quad.tolerance);
  fdd->add_option("--report", report_path);

  auto* mid = app.add_subcommand("maxid-check",
                                 "max-divisibility 4-way split check");
  mid->add_option("config", config_path)->required();
  mid->add_option("--replicates", replicates);
  mid->add_option("--seed", seed);
  mid->add_option("--ks-limit", ks_limit);
  mid->add_option("--report", report_path);

  auto* cls = app.add_subcommand("classify",
                                 "conservative/dissipative flow probe");
  cls->add_option("config", config_path)->required();
  cls->add_option("--seed", seed);
  cls->add_option("--curves", curves_path);
  cls->add_option("--report", report_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      if (report_path.empty()) report_path = "simulate_report.json";
      return cmd_simulate(config_path, seed, budget, out_path, report_path);
    }
    if (fig->parsed()) {
      if (report_path.empty()) report_path = "figure1_report.json";
      return cmd_figure1(seed, size, spacing, out_path, report_path);
    }
    if (audit->parsed()) {
      if (report_path.empty()) report_path = "metrics_audit_report.json";
      return cmd_metrics_audit(trials, replicates, seed, report_path);
    }
    if (fdd->parsed()) {
      if (report_path.empty()) report_path = "fdd_check_report.json";
      quad.method = quad_method == "mc" ? maxid::QuadratureSpec::kMonteCarlo
                                        : maxid::QuadratureSpec::kAdaptive;
      quad.seed = seed;
      return cmd_fdd_check(config_path, replicates, seed, quad, report_path);
    }
    if (mid->parsed()) {
      if (report_path.empty()) report_path = "maxid_check_report.json";
      if (mid->count("--replicates") == 0) replicates = 10000;
      return cmd_maxid_check(config_path, replicates, seed, ks_limit,
                             report_path);
    }
    if (cls->parsed()) {
      if (report_path.empty()) report_path = "classify_report.json";
      if (curves_path.empty()) curves_path = "classify_curves.csv";
      return cmd_classify(config_path, seed, curves_path, report_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
