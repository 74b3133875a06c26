#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "natlearn/dataset.hpp"
#include "natlearn/error.hpp"
#include "natlearn/model.hpp"

namespace natlearn {

struct Prediction {
  int label = 0;
  double d_s = 0.0;
  double d_o = 0.0;
};

/// Euclidean distance between two aligned vectors. Summation runs in index
/// order; training and prediction both go through here so their results agree
/// bit for bit.
inline double aligned_distance(const double* a, const double* b, std::size_t len) {
  double sum = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

/// Euclidean distance restricted to the features in m.
inline double distance(std::span<const double> a, std::span<const double> b, const FeatureSet& m) {
  double sum = 0.0;
  for (std::size_t j : m) {
    if (j >= a.size() || j >= b.size()) throw DimensionError("vector does not cover feature " + std::to_string(j));
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return std::sqrt(sum);
}

/// Nearest-prototype rule: the o-prototype wins only on a strictly smaller distance.
inline Prediction decide(double d_s, double d_o, int label_s, int label_o) {
  return {d_o < d_s ? label_o : label_s, d_s, d_o};
}

/// Projects x onto the model's features in training space. x may be a full
/// schema row (length meta.p) or already restricted (length |M|).
inline std::vector<double> model_view(const NLModel& model, std::span<const double> x) {
  const std::size_t m = model.features.size();
  std::vector<double> z(m);
  if (x.size() == model.meta.p) {
    for (std::size_t k = 0; k < m; ++k) z[k] = x[model.features[k]];
  } else if (x.size() == m) {
    for (std::size_t k = 0; k < m; ++k) z[k] = x[k];
  } else {
    throw DimensionError("input has " + std::to_string(x.size()) + " values; expected " +
                         std::to_string(model.meta.p) + " (full schema) or " + std::to_string(m) +
                         " (model features)");
  }
  if (model.scaler) {
    for (std::size_t k = 0; k < m; ++k) z[k] = model.scaler->apply(k, z[k]);
  }
  return z;
}

inline Prediction predict_projected(const NLModel& model, const std::vector<double>& z) {
  const std::size_t m = model.features.size();
  return decide(aligned_distance(z.data(), model.proto_s.values.data(), m),
                aligned_distance(z.data(), model.proto_o.values.data(), m), model.proto_s.label,
                model.proto_o.label);
}

inline Prediction predict_one(const NLModel& model, std::span<const double> x) {
  return predict_projected(model, model_view(model, x));
}

/// Column of each model feature in a table, matched by name.
inline std::vector<std::size_t> model_columns(const NLModel& model, const std::vector<std::string>& names) {
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t j = 0; j < names.size(); ++j) where.emplace(names[j], j);
  std::vector<std::size_t> cols;
  std::string missing;
  for (const auto& name : model.feature_names) {
    auto it = where.find(name);
    if (it == where.end()) {
      missing += (missing.empty() ? "" : ", ") + name;
    } else {
      cols.push_back(it->second);
    }
  }
  if (!missing.empty()) throw DimensionError("input is missing model features: " + missing);
  return cols;
}

inline std::vector<Prediction> predict_batch(const NLModel& model, const FeatureTable& table) {
  const auto cols = model_columns(model, table.names);
  std::vector<Prediction> out;
  out.reserve(table.n);
  std::vector<double> z(cols.size());
  for (std::size_t i = 0; i < table.n; ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) z[k] = table.at(i, cols[k]);
    out.push_back(predict_one(model, z));
  }
  return out;
}

struct BatchResult {
  std::vector<Prediction> predictions;
  std::vector<int> predicted;
  std::size_t errors = 0;
};

inline BatchResult predict_batch(const NLModel& model, const Dataset& ds) {
  BatchResult r;
  r.predictions = predict_batch(model, ds.features());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    r.predicted.push_back(r.predictions[i].label);
    if (r.predictions[i].label != ds.label(i)) ++r.errors;
  }
  return r;
}

}  // namespace natlearn
