#include <nlohmann/json.hpp>

#include "cortexenc/binary_io.hpp"
#include "cortexenc/encode.hpp"
#include "cortexenc/error.hpp"

namespace cortexenc::encode {

using nlohmann::ordered_json;

std::string format_result_json(const EncodingResult& r) {
  ordered_json j;
  j["subject"] = r.subject_id;
  j["model"] = r.model_name;
  j["layer"] = r.layer ? ordered_json(*r.layer) : ordered_json(nullptr);
  j["lambda"] = r.lambda;
  j["lambda_grid"] = r.lambda_grid;
  j["K"] = r.folds;
  j["seed"] = r.seed;
  j["scheme"] = to_string(r.scheme);
  j["scoring"] = to_string(r.scoring);
  j["config_hash"] = r.config_hash;
  j["target_names"] = r.target_names;
  j["per_target_r"] = std::vector<double>(r.per_target_r.data(), r.per_target_r.data() + r.per_target_r.size());
  auto flags = ordered_json::array();
  for (auto f : r.degenerate) flags.push_back(f != 0);
  j["degenerate_flags"] = flags;
  auto fold_rs = ordered_json::array();
  for (Eigen::Index f = 0; f < r.fold_rs.rows(); ++f) {
    std::vector<double> row(static_cast<std::size_t>(r.fold_rs.cols()));
    for (Eigen::Index t = 0; t < r.fold_rs.cols(); ++t) row[static_cast<std::size_t>(t)] = r.fold_rs(f, t);
    fold_rs.push_back(row);
  }
  j["fold_rs"] = fold_rs;
  if (!r.lambda_grid.empty()) {
    auto chosen = ordered_json::array();
    for (Eigen::Index f = 0; f < r.fold_lambdas.rows(); ++f) {
      std::vector<double> row(static_cast<std::size_t>(r.fold_lambdas.cols()));
      for (Eigen::Index t = 0; t < r.fold_lambdas.cols(); ++t) row[static_cast<std::size_t>(t)] = r.fold_lambdas(f, t);
      chosen.push_back(row);
    }
    j["fold_lambdas"] = chosen;
  }
  return j.dump(1) + "\n";
}

std::string format_result_csv(const EncodingResult& r) {
  std::string out = "target,r,degenerate\n";
  for (Eigen::Index t = 0; t < r.targets(); ++t) {
    out += r.target_names.at(static_cast<std::size_t>(t));
    out += ',';
    out += io::format_double(r.per_target_r(t));
    out += ',';
    out += r.degenerate.at(static_cast<std::size_t>(t)) ? "1" : "0";
    out += '\n';
  }
  return out;
}

EncodingResult parse_result_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::decode, std::string("encoding result is not valid JSON: ") + e.what());
  }
  try {
    EncodingResult r;
    r.subject_id = j.at("subject").get<std::string>();
    r.model_name = j.at("model").get<std::string>();
    if (!j.at("layer").is_null()) r.layer = j.at("layer").get<int>();
    r.lambda = j.at("lambda").get<double>();
    r.lambda_grid = j.value("lambda_grid", std::vector<double>{});
    r.folds = j.at("K").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.scheme = parse_fold_scheme(j.at("scheme").get<std::string>()).value_or(FoldScheme::contiguous);
    r.scoring = parse_scoring(j.at("scoring").get<std::string>()).value_or(Scoring::fold_mean);
    r.config_hash = j.at("config_hash").get<std::string>();
    r.target_names = j.at("target_names").get<std::vector<std::string>>();
    const auto per = j.at("per_target_r").get<std::vector<double>>();
    r.per_target_r = Eigen::Map<const Eigen::VectorXd>(per.data(), static_cast<Eigen::Index>(per.size()));
    for (const auto& f : j.at("degenerate_flags")) r.degenerate.push_back(f.get<bool>() ? 1 : 0);
    const auto& rows = j.at("fold_rs");
    r.fold_rs.resize(static_cast<Eigen::Index>(rows.size()), r.per_target_r.size());
    for (std::size_t f = 0; f < rows.size(); ++f) {
      const auto row = rows[f].get<std::vector<double>>();
      require(static_cast<Eigen::Index>(row.size()) == r.per_target_r.size(), ErrorKind::mismatch,
              "fold_rs row width differs from target count");
      for (std::size_t t = 0; t < row.size(); ++t) r.fold_rs(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(t)) = row[t];
    }
    r.fold_lambdas = Eigen::MatrixXd::Constant(r.fold_rs.rows(), r.fold_rs.cols(), r.lambda);
    if (j.contains("fold_lambdas")) {
      const auto& chosen = j.at("fold_lambdas");
      require(chosen.size() == rows.size(), ErrorKind::mismatch, "fold_lambdas row count differs from K");
      for (std::size_t f = 0; f < chosen.size(); ++f) {
        const auto row = chosen[f].get<std::vector<double>>();
        require(static_cast<Eigen::Index>(row.size()) == r.per_target_r.size(), ErrorKind::mismatch,
                "fold_lambdas row width differs from target count");
        for (std::size_t t = 0; t < row.size(); ++t) r.fold_lambdas(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(t)) = row[t];
      }
    }
    require(r.target_names.size() == per.size() && r.degenerate.size() == per.size(), ErrorKind::mismatch,
            "encoding result arrays differ in length");
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::schema, std::string("malformed encoding result: ") + e.what());
  }
}

}  // namespace cortexenc::encode
