// JSON (de)serialization for models, fit results and Monte Carlo configs.
#pragma once

#include <json.hpp>

#include "cmar/fit.hpp"
#include "cmar/montecarlo.hpp"

namespace cmar {

nlohmann::json to_json(const MatrixXd& m);
MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CmarModel& model);
CmarModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EstimationResult& result, const std::string& method);

McConfig mc_config_from_json(const nlohmann::json& j);

}  // namespace cmar
