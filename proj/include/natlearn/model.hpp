#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "natlearn/dataset.hpp"
#include "natlearn/error.hpp"

namespace natlearn {

struct Prototype {
  std::size_t sample_id = 0;
  int label = 0;
  std::vector<double> values;  // restricted to the model's features, training space
};

struct ModelMetadata {
  std::size_t train_error = 0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::string distance = "euclidean";
  std::size_t n = 0;
  std::size_t p = 0;
  std::string created_at;
};

/// A trained two-prototype classifier.
///
/// `proto_s` is the prototype found as the pivot's same-class neighbor and
/// wins distance ties. When `scaler` is set, prototype values live in min-max
/// space and inputs are scaled before comparison; its entries align with
/// `features`.
struct NLModel {
  FeatureSet features;
  std::vector<std::string> feature_names;
  Prototype proto_s;
  Prototype proto_o;
  std::optional<Scaler> scaler;
  std::array<std::string, 2> label_values{"0", "1"};
  ModelMetadata meta;

  bool scaled() const { return scaler.has_value(); }

  void validate() const {
    if (features.size() < 2) throw ContractError("model needs at least 2 prototype features");
    check_feature_set(features, meta.p == 0 ? features.back() + 1 : meta.p);
    if (feature_names.size() != features.size()) throw ContractError("feature name count does not match features");
    if (proto_s.values.size() != features.size() || proto_o.values.size() != features.size()) {
      throw ContractError("prototype length does not match feature count");
    }
    if (proto_s.label == proto_o.label) throw ContractError("prototypes must carry distinct labels");
    for (int l : {proto_s.label, proto_o.label}) {
      if (l != 0 && l != 1) throw ContractError("prototype label must be 0 or 1");
    }
    if (scaler && scaler->size() != features.size()) throw ContractError("scaler does not align with features");
  }
};

}  // namespace natlearn
