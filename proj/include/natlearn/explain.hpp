#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "natlearn/csv.hpp"
#include "natlearn/model.hpp"
#include "natlearn/predict.hpp"

namespace natlearn {

namespace detail {

inline std::string sig4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

inline std::string class_name(const NLModel& model, int label) {
  return model.label_values[static_cast<std::size_t>(label)] + " (" + std::to_string(label) + ")";
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace detail

/// Human-readable model card. With a sample, also reports both distances,
/// per-feature contributions (|x - o| - |x - s|) and the decision.
inline std::string explain(const NLModel& model, std::optional<std::span<const double>> x = std::nullopt) {
  using detail::class_name;
  using detail::pad;
  using detail::sig4;
  const auto& s = model.proto_s;
  const auto& o = model.proto_o;
  const std::size_t m = model.features.size();

  std::ostringstream out;
  out << "Natural Learning model: 2 prototypes, " << m << " features, " << model.meta.distance << " distance\n";
  out << "Rule: a sample is labeled " << class_name(model, o.label) << " if it is closer to prototype #"
      << o.sample_id << " than to prototype #" << s.sample_id << " over the features below; otherwise it is labeled "
      << class_name(model, s.label) << ".\n";
  out << "Prototype #" << s.sample_id << ": class " << class_name(model, s.label) << "\n";
  out << "Prototype #" << o.sample_id << ": class " << class_name(model, o.label) << "\n";
  if (model.scaled()) out << "Values are min-max scaled with the training range.\n";
  out << "Training error: " << model.meta.train_error << " of " << model.meta.n << " samples, "
      << model.meta.iterations << " iteration(s)\n\n";

  std::size_t name_w = 7;
  for (const auto& nm : model.feature_names) name_w = std::max(name_w, nm.size());
  name_w += 2;
  const std::string head_s = "#" + std::to_string(s.sample_id);
  const std::string head_o = "#" + std::to_string(o.sample_id);
  out << pad("feature", name_w) << pad(head_s, 12) << pad(head_s + " (full)", 26) << pad(head_o, 12)
      << head_o << " (full)\n";
  for (std::size_t k = 0; k < m; ++k) {
    out << pad(model.feature_names[k], name_w) << pad(sig4(s.values[k]), 12) << pad(format_real(s.values[k]), 26)
        << pad(sig4(o.values[k]), 12) << format_real(o.values[k]) << "\n";
  }

  if (!x) return out.str();

  const auto z = model_view(model, *x);
  const auto pred = predict_projected(model, z);
  out << "\nSample: distance to #" << s.sample_id << " (d_s) = " << format_real(pred.d_s) << ", distance to #"
      << o.sample_id << " (d_o) = " << format_real(pred.d_o) << "\n";
  out << pad("feature", name_w) << pad("value", 14) << pad("|x-s|", 14) << pad("|x-o|", 14)
      << "contribution (|x-o| - |x-s|)\n";
  for (std::size_t k = 0; k < m; ++k) {
    const double vs = std::abs(z[k] - s.values[k]);
    const double vo = std::abs(z[k] - o.values[k]);
    out << pad(model.feature_names[k], name_w) << pad(sig4(z[k]), 14) << pad(sig4(vs), 14) << pad(sig4(vo), 14)
        << sig4(vo - vs) << "\n";
  }
  const bool to_o = pred.label == o.label;
  const auto& winner = to_o ? o : s;
  out << "Decision: " << class_name(model, pred.label) << ", closer to prototype #" << winner.sample_id;
  if ((to_o ? pred.d_o : pred.d_s) == 0.0) {
    out << " (distance 0 to prototype of class " << class_name(model, winner.label) << ")";
  }
  if (pred.d_s == pred.d_o) out << " (tie goes to prototype #" << s.sample_id << ")";
  out << "\n";
  return out.str();
}

}  // namespace natlearn
