#pragma once

#include <cstddef>
#include <span>

#include "natlearn/dataset.hpp"
#include "natlearn/error.hpp"
#include "natlearn/model.hpp"

namespace natlearn {

/// Binary confusion counts; label 1 is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion(std::span<const int> y, std::span<const int> predicted) {
  if (y.size() != predicted.size()) throw DimensionError("label vectors differ in length");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1) {
      ++(predicted[i] == 1 ? cm.tp : cm.fn);
    } else {
      ++(predicted[i] == 1 ? cm.fp : cm.tn);
    }
  }
  return cm;
}

inline double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ContractError("accuracy of an empty evaluation");
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

inline double error_rate(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ContractError("error rate of an empty evaluation");
  return static_cast<double>(cm.fp + cm.fn) / static_cast<double>(cm.total());
}

/// F1 of the positive class, 2tp / (2tp + fp + fn); 0 when that is 0/0.
inline double f_measure(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ContractError("f-measure of an empty evaluation");
  const std::size_t denom = 2 * cm.tp + cm.fp + cm.fn;
  if (denom == 0) return 0.0;
  return static_cast<double>(2 * cm.tp) / static_cast<double>(denom);
}

struct SparsityReport {
  double feature_ratio = 0.0;  // |M| / p
  double sample_ratio = 0.0;   // 2 / n
};

inline SparsityReport sparsity_report(const NLModel& model, const Dataset& ds) {
  if (ds.p() == 0 || ds.n() == 0) throw ContractError("sparsity of an empty dataset");
  return {static_cast<double>(model.features.size()) / static_cast<double>(ds.p()),
          2.0 / static_cast<double>(ds.n())};
}

}  // namespace natlearn
