#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "natlearn/error.hpp"
#include "natlearn/model.hpp"

namespace natlearn {

inline constexpr int kModelFormatVersion = 1;

/// Model file layout. Prototype records are ordered s then o; the first wins
/// distance ties. Keys serialize sorted (nlohmann's default object map).
inline nlohmann::json model_to_json(const NLModel& model) {
  using nlohmann::json;
  json j;
  j["format_version"] = kModelFormatVersion;
  j["distance"] = model.meta.distance;
  j["scaled"] = model.scaled();
  if (model.scaler) j["scaler"] = {{"min", model.scaler->min}, {"max", model.scaler->max}};
  j["feature_indices"] = model.features;
  j["feature_names"] = model.feature_names;
  j["labels"] = model.label_values;
  j["prototypes"] = json::array();
  for (const auto* proto : {&model.proto_s, &model.proto_o}) {
    j["prototypes"].push_back({{"sample_id", proto->sample_id}, {"label", proto->label}, {"values", proto->values}});
  }
  j["metadata"] = {{"train_error", model.meta.train_error}, {"iterations", model.meta.iterations},
                   {"seed", model.meta.seed},               {"n", model.meta.n},
                   {"p", model.meta.p},                     {"created_at", model.meta.created_at}};
  return j;
}

inline NLModel model_from_json(const nlohmann::json& j) {
  NLModel model;
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw ParseError("unsupported model format_version " + std::to_string(version));
    }
    model.meta.distance = j.at("distance").get<std::string>();
    if (model.meta.distance != "euclidean") throw ParseError("unsupported distance '" + model.meta.distance + "'");
    if (j.at("scaled").get<bool>()) {
      Scaler sc;
      sc.min = j.at("scaler").at("min").get<std::vector<double>>();
      sc.max = j.at("scaler").at("max").get<std::vector<double>>();
      model.scaler = std::move(sc);
    }
    model.features = j.at("feature_indices").get<FeatureSet>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.label_values = j.at("labels").get<std::array<std::string, 2>>();
    const auto& protos = j.at("prototypes");
    if (!protos.is_array() || protos.size() != 2) throw ParseError("model must hold exactly 2 prototypes");
    Prototype* targets[2] = {&model.proto_s, &model.proto_o};
    for (std::size_t k = 0; k < 2; ++k) {
      targets[k]->sample_id = protos[k].at("sample_id").get<std::size_t>();
      targets[k]->label = protos[k].at("label").get<int>();
      targets[k]->values = protos[k].at("values").get<std::vector<double>>();
    }
    const auto& meta = j.at("metadata");
    model.meta.train_error = meta.at("train_error").get<std::size_t>();
    model.meta.iterations = meta.at("iterations").get<std::size_t>();
    model.meta.seed = meta.at("seed").get<std::uint64_t>();
    model.meta.n = meta.at("n").get<std::size_t>();
    model.meta.p = meta.at("p").get<std::size_t>();
    model.meta.created_at = meta.at("created_at").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model: ") + e.what());
  }
  try {
    model.validate();
  } catch (const ContractError& e) {
    throw ParseError(std::string("invalid model: ") + e.what());
  }
  return model;
}

/// Canonical text: sorted keys, two-space indent, shortest round-trip reals.
inline std::string serialize_model(const NLModel& model) { return model_to_json(model).dump(2) + "\n"; }

inline NLModel parse_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model JSON: ") + e.what());
  }
  return model_from_json(j);
}

inline void save_model(const NLModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << serialize_model(model);
}

inline NLModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace natlearn
