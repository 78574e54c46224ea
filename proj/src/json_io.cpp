#include "cmar/json_io.hpp"

#include <stdexcept>

namespace cmar {

using nlohmann::json;

json to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("matrix json: expected array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return MatrixXd(0, 0);
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw std::invalid_argument("matrix json: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

json to_json(const CmarModel& model) {
  json j;
  j["dims"] = {{"d1", model.dims.d1}, {"d2", model.dims.d2}, {"k", model.dims.k},
               {"r1", model.dims.r1}, {"r2", model.dims.r2}};
  j["alpha1"] = to_json(model.alpha1);
  j["beta1"] = to_json(model.beta1);
  j["alpha2"] = to_json(model.alpha2);
  j["beta2"] = to_json(model.beta2);
  json b = json::array();
  for (const auto& [b1, b2] : model.B) b.push_back({{"B1", to_json(b1)}, {"B2", to_json(b2)}});
  j["B"] = std::move(b);
  j["D"] = to_json(model.D);
  switch (model.error_cov.variant) {
    case ErrorCovSpec::Variant::Identity:
      j["error_cov"] = {{"variant", "identity"}};
      break;
    case ErrorCovSpec::Variant::SettingI:
      j["error_cov"] = {{"variant", "I"}, {"sigma", to_json(model.error_cov.sigma)}};
      break;
    case ErrorCovSpec::Variant::SettingII:
      j["error_cov"] = {{"variant", "II"},
                        {"sigma1", to_json(model.error_cov.sigma1)},
                        {"sigma2", to_json(model.error_cov.sigma2)}};
      break;
  }
  return j;
}

CmarModel model_from_json(const json& j) {
  CmarModel m;
  m.dims = Dims{j.at("dims").at("d1").get<int>(), j.at("dims").at("d2").get<int>(),
                j.at("dims").at("k").get<int>(), j.at("dims").at("r1").get<int>(),
                j.at("dims").at("r2").get<int>()};
  m.alpha1 = matrix_from_json(j.at("alpha1"));
  m.beta1 = matrix_from_json(j.at("beta1"));
  m.alpha2 = matrix_from_json(j.at("alpha2"));
  m.beta2 = matrix_from_json(j.at("beta2"));
  for (const auto& item : j.at("B"))
    m.B.emplace_back(matrix_from_json(item.at("B1")), matrix_from_json(item.at("B2")));
  m.D = matrix_from_json(j.at("D"));
  const std::string variant = j.at("error_cov").at("variant").get<std::string>();
  if (variant == "identity") {
    m.error_cov = ErrorCovSpec::identity();
  } else if (variant == "I") {
    m.error_cov = ErrorCovSpec::setting_i(matrix_from_json(j.at("error_cov").at("sigma")));
  } else if (variant == "II") {
    m.error_cov = ErrorCovSpec::setting_ii(matrix_from_json(j.at("error_cov").at("sigma1")),
                                           matrix_from_json(j.at("error_cov").at("sigma2")));
  } else {
    throw std::invalid_argument("model json: unknown error_cov variant '" + variant + "'");
  }
  m.validate();
  return m;
}

json to_json(const EstimationResult& result, const std::string& method) {
  json j;
  j["method"] = method;
  j["model"] = to_json(result.model);
  j["projections"] = {{"P1", to_json(projection(result.model.beta1))},
                      {"P2", to_json(projection(result.model.beta2))}};
  j["diagnostics"] = {{"iterations", result.iterations},
                      {"converged", result.converged},
                      {"ridged", result.ridged},
                      {"objective_trace", result.objective_trace}};
  if (result.sigma1.size() > 0) {
    j["sigma1"] = to_json(result.sigma1);
    j["sigma2"] = to_json(result.sigma2);
  }
  return j;
}

McConfig mc_config_from_json(const json& j) {
  McConfig cfg;
  cfg.dims_grid.clear();
  for (const auto& d : j.at("dims"))
    cfg.dims_grid.push_back(Dims{d.at("d1").get<int>(), d.at("d2").get<int>(),
                                 d.value("k", 0), d.at("r1").get<int>(), d.at("r2").get<int>()});
  cfg.t_grid = j.at("T").get<std::vector<int>>();
  cfg.reps = j.value("reps", 100);
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : j.at("methods")) {
      const std::string name = m.get<std::string>();
      if (name == "CVAR")
        cfg.methods.push_back(McMethod::Cvar);
      else if (name == "LSE")
        cfg.methods.push_back(McMethod::Lse);
      else if (name == "MLE")
        cfg.methods.push_back(McMethod::Mle);
      else
        throw std::invalid_argument("mc config: unknown method '" + name + "'");
    }
  }
  const std::string setting = j.value("error_setting", std::string("II"));
  if (setting == "I")
    cfg.error_setting = ErrorSetting::I;
  else if (setting == "II")
    cfg.error_setting = ErrorSetting::II;
  else if (setting == "identity")
    cfg.error_setting = ErrorSetting::Identity;
  else
    throw std::invalid_argument("mc config: unknown error_setting '" + setting + "'");
  cfg.include_constant = j.value("include_constant", false);
  cfg.base_seed = j.value("base_seed", static_cast<std::uint64_t>(0));
  cfg.redraw_per_rep = j.value("redraw_per_rep", false);
  cfg.record_runtime = j.value("record_runtime", false);
  cfg.threads = j.value("threads", 0);
  cfg.validate();
  return cfg;
}

}  // namespace cmar
