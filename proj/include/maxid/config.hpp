#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "maxid/spectral.hpp"

namespace maxid {

using nlohmann::json;

// Model table of the declarative config file; unrecognized keys are errors.
ModelPtr model_from_json(const json& j);

// Penrose models need the index grid at construction time.
ModelPtr model_from_json(const json& j, const std::vector<VectorXd>& grid);

StormProfile storm_from_json(const json& j);

json load_config_file(const std::string& path);

// {"dim": d, "lo": a, "hi": b, "n": count} -> uniform grid (d = 1 or 2).
std::vector<VectorXd> grid_from_json(const json& j);

}  // namespace maxid
