#include "maxid/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace maxid {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object())
    throw std::invalid_argument("config: " + where + " must be a table");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("config: unknown key \"" + it.key() +
                                  "\" in " + where);
}

double num(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

}  // namespace

StormProfile storm_from_json(const json& j) {
  check_keys(j, {"shape", "height", "scale", "t", "v"}, "storm");
  StormProfile storm;
  std::string shape = j.value("shape", "exp");
  if (shape == "exp")
    storm.shape = StormProfile::kExpBump;
  else if (shape == "indicator")
    storm.shape = StormProfile::kIndicator;
  else if (shape == "table")
    storm.shape = StormProfile::kTable;
  else
    throw std::invalid_argument("config: unknown storm shape \"" + shape +
                                "\"");
  storm.height = num(j, "height", 1.0);
  storm.scale = num(j, "scale", 1.0);
  if (storm.shape == StormProfile::kTable) {
    storm.table_t = j.at("t").get<std::vector<double>>();
    storm.table_v = j.at("v").get<std::vector<double>>();
  }
  storm.validate();
  return storm;
}

ModelPtr model_from_json(const json& j) {
  return model_from_json(j, {});
}

ModelPtr model_from_json(const json& j, const std::vector<VectorXd>& grid) {
  if (!j.is_object() || !j.contains("kind"))
    throw std::invalid_argument("config: model table needs a \"kind\"");
  std::string kind = j.at("kind").get<std::string>();

  if (kind == "moving_maxima") {
    check_keys(j, {"kind", "storm", "lambda", "d"}, "model");
    return make_moving_maxima(storm_from_json(j.value("storm", json::object())),
                              num(j, "lambda", 1.0),
                              static_cast<int>(num(j, "d", 1)));
  }
  if (kind == "poisson_line") {
    check_keys(j, {"kind", "storm", "lambda"}, "model");
    return make_poisson_line(storm_from_json(j.value("storm", json::object())),
                             num(j, "lambda", 1.0));
  }
  if (kind == "poisson_line_maxstable") {
    check_keys(j, {"kind", "storm", "lambda", "alpha"}, "model");
    return make_poisson_line_maxstable(
        storm_from_json(j.value("storm", json::object())),
        num(j, "lambda", 1.0), num(j, "alpha", 1.0));
  }
  if (kind == "penrose") {
    check_keys(j, {"kind", "storm_kind", "k", "hurst", "sigma2", "lambda",
                   "node_guard"},
               "model");
    PenroseSpec spec;
    std::string sk = j.value("storm_kind", "brownian");
    if (sk == "brownian")
      spec.storm_kind = PenroseSpec::kBrownian;
    else if (sk == "fbm")
      spec.storm_kind = PenroseSpec::kFbmField;
    else
      throw std::invalid_argument("config: unknown penrose storm kind \"" +
                                  sk + "\"");
    spec.k = static_cast<int>(num(j, "k", 1));
    spec.fbm.hurst = num(j, "hurst", 0.5);
    spec.fbm.sigma2 = num(j, "sigma2", 1.0);
    spec.lambda = num(j, "lambda", 1.0);
    spec.fbm_node_guard = static_cast<int>(
        num(j, "node_guard", FbmFieldSampler::kDefaultNodeGuard));
    if (grid.empty())
      throw std::invalid_argument(
          "config: penrose models need the simulation grid");
    return make_penrose(spec, grid);
  }
  if (kind == "boolean_set") {
    check_keys(j, {"kind", "grain", "lambda", "d"}, "model");
    int d = static_cast<int>(num(j, "d", 2));
    GrainSet grain;
    grain.dim = d;
    if (j.contains("grain")) {
      const json& g = j.at("grain");
      check_keys(g, {"shape", "radius", "half_widths"}, "grain");
      std::string gs = g.value("shape", "disk");
      if (gs == "disk") {
        grain.shape = GrainSet::kDisk;
        grain.radius = num(g, "radius", 1.0);
      } else if (gs == "box") {
        grain.shape = GrainSet::kBox;
        auto hw = g.at("half_widths").get<std::vector<double>>();
        grain.half_widths =
            Eigen::Map<VectorXd>(hw.data(), static_cast<Eigen::Index>(hw.size()));
      } else {
        throw std::invalid_argument("config: unknown grain shape \"" + gs +
                                    "\"");
      }
    }
    return make_boolean(grain, num(j, "lambda", 1.0), d);
  }
  if (kind == "iid") {
    check_keys(j, {"kind", "cdf_x", "cdf_p", "index_count"}, "model");
    return make_iid(j.at("cdf_x").get<std::vector<double>>(),
                    j.at("cdf_p").get<std::vector<double>>(),
                    static_cast<int>(num(j, "index_count", 1)));
  }
  if (kind == "frechet_lift") {
    check_keys(j, {"kind", "g", "base_mass", "alpha"}, "model");
    auto rows = j.at("g").get<std::vector<std::vector<double>>>();
    auto bm = j.at("base_mass").get<std::vector<double>>();
    Eigen::MatrixXd G(rows.size(), bm.size());
    for (size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != bm.size())
        throw std::invalid_argument("config: ragged g matrix");
      for (size_t c = 0; c < bm.size(); ++c) G(r, c) = rows[r][c];
    }
    VectorXd mass =
        Eigen::Map<VectorXd>(bm.data(), static_cast<Eigen::Index>(bm.size()));
    return make_frechet_lift(G, mass, num(j, "alpha", 1.0));
  }
  throw std::invalid_argument("config: unknown model kind \"" + kind + "\"");
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return j;
}

std::vector<VectorXd> grid_from_json(const json& j) {
  check_keys(j, {"dim", "lo", "hi", "n"}, "grid");
  int dim = static_cast<int>(num(j, "dim", 1));
  double lo = num(j, "lo", -1.0), hi = num(j, "hi", 1.0);
  int n = static_cast<int>(num(j, "n", 64));
  if (n < 1 || !(hi > lo))
    throw std::invalid_argument("config: grid needs n >= 1 and hi > lo");
  std::vector<VectorXd> grid;
  if (dim == 1) {
    for (int i = 0; i < n; ++i) {
      VectorXd t(1);
      t << (n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
      grid.push_back(t);
    }
  } else if (dim == 2) {
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        VectorXd t(2);
        double a = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        double b = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
        t << b, a;
        grid.push_back(t);
      }
  } else {
    throw std::invalid_argument("config: grid dim must be 1 or 2");
  }
  return grid;
}

}  // namespace maxid
