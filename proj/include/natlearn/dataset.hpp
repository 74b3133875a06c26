#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "natlearn/csv.hpp"
#include "natlearn/error.hpp"
#include "natlearn/random.hpp"

namespace natlearn {

/// Sorted, duplicate-free set of 0-based feature (column) indices.
using FeatureSet = std::vector<std::size_t>;

inline FeatureSet all_features(std::size_t p) {
  FeatureSet m(p);
  std::iota(m.begin(), m.end(), std::size_t{0});
  return m;
}

inline void check_feature_set(const FeatureSet& m, std::size_t p) {
  if (m.empty()) throw ContractError("feature set is empty");
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] >= p) throw ContractError("feature index " + std::to_string(m[k]) + " out of range");
    if (k > 0 && m[k] <= m[k - 1]) throw ContractError("feature set must be sorted and unique");
  }
}

/// Row-major n x p matrix of reals with column names.
struct FeatureTable {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> values;
  std::vector<std::string> names;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * p, p}; }
  double at(std::size_t i, std::size_t j) const { return values[i * p + j]; }
};

/// Labeled binary-classification data. Immutable once built.
///
/// Structural invariants (checked on construction): every value finite,
/// labels in {0,1}, both classes present, ids one per row. Training-specific
/// size requirements are checked separately by require_trainable().
class Dataset {
 public:
  Dataset() = default;

  Dataset(FeatureTable features, std::vector<int> labels, std::vector<std::size_t> sample_ids = {},
          std::array<std::string, 2> label_values = {"0", "1"}, std::string label_name = "label")
      : x_(std::move(features)),
        y_(std::move(labels)),
        ids_(std::move(sample_ids)),
        label_values_(std::move(label_values)),
        label_name_(std::move(label_name)) {
    if (x_.values.size() != x_.n * x_.p) throw DimensionError("feature matrix size does not match n*p");
    if (y_.size() != x_.n) throw DimensionError("label count does not match row count");
    if (x_.names.empty()) {
      for (std::size_t j = 0; j < x_.p; ++j) x_.names.push_back("F" + std::to_string(j + 1));
    }
    if (x_.names.size() != x_.p) throw DimensionError("feature name count does not match p");
    if (ids_.empty()) {
      ids_.resize(x_.n);
      std::iota(ids_.begin(), ids_.end(), std::size_t{0});
    }
    if (ids_.size() != x_.n) throw DimensionError("sample id count does not match row count");
    for (double v : x_.values) {
      if (!std::isfinite(v)) throw ContractError("dataset contains a non-finite value");
    }
    for (int label : y_) {
      if (label != 0 && label != 1) throw LabelCardinalityError("labels must be 0 or 1");
    }
    counts_ = {0, 0};
    for (int label : y_) ++counts_[static_cast<std::size_t>(label)];
    if (x_.n > 0 && (counts_[0] == 0 || counts_[1] == 0)) {
      throw ClassSizeError("dataset must contain both classes");
    }
  }

  /// Convenience constructor from nested rows.
  static Dataset from_rows(const std::vector<std::vector<double>>& rows, std::vector<int> labels,
                           std::vector<std::string> names = {}) {
    FeatureTable t;
    t.n = rows.size();
    t.p = rows.empty() ? names.size() : rows.front().size();
    t.names = std::move(names);
    t.values.reserve(t.n * t.p);
    for (const auto& r : rows) {
      if (r.size() != t.p) throw DimensionError("ragged rows");
      t.values.insert(t.values.end(), r.begin(), r.end());
    }
    return Dataset(std::move(t), std::move(labels));
  }

  std::size_t n() const { return x_.n; }
  std::size_t p() const { return x_.p; }
  std::span<const double> row(std::size_t i) const { return x_.row(i); }
  double at(std::size_t i, std::size_t j) const { return x_.at(i, j); }
  int label(std::size_t i) const { return y_[i]; }
  const std::vector<int>& labels() const { return y_; }
  const FeatureTable& features() const { return x_; }
  const std::vector<std::string>& feature_names() const { return x_.names; }
  const std::vector<std::size_t>& sample_ids() const { return ids_; }
  std::size_t sample_id(std::size_t i) const { return ids_[i]; }
  const std::array<std::string, 2>& label_values() const { return label_values_; }
  const std::string& label_name() const { return label_name_; }
  std::size_t class_count(int label) const { return counts_[static_cast<std::size_t>(label)]; }

  /// Rows selected in the given order; ids and metadata carried over.
  Dataset subset(std::span<const std::size_t> rows) const {
    FeatureTable t;
    t.n = rows.size();
    t.p = x_.p;
    t.names = x_.names;
    t.values.reserve(t.n * t.p);
    std::vector<int> y;
    std::vector<std::size_t> ids;
    for (std::size_t i : rows) {
      if (i >= x_.n) throw ContractError("row index out of range");
      const auto r = x_.row(i);
      t.values.insert(t.values.end(), r.begin(), r.end());
      y.push_back(y_[i]);
      ids.push_back(ids_[i]);
    }
    return Dataset(std::move(t), std::move(y), std::move(ids), label_values_, label_name_);
  }

  /// Same rows and labels with replaced feature values (used by scaling).
  Dataset with_values(std::vector<double> values) const {
    FeatureTable t = x_;
    t.values = std::move(values);
    return Dataset(std::move(t), y_, ids_, label_values_, label_name_);
  }

 private:
  FeatureTable x_;
  std::vector<int> y_;
  std::vector<std::size_t> ids_;
  std::array<std::string, 2> label_values_{"0", "1"};
  std::string label_name_ = "label";
  std::array<std::size_t, 2> counts_{0, 0};
};

/// Requirements for NL training: p >= 2, n >= 4, at least 2 samples per class.
inline void require_trainable(const Dataset& ds) {
  if (ds.p() < 2) throw ContractError("at least 2 feature columns are required (p >= 2), got " +
                                      std::to_string(ds.p()));
  if (ds.n() < 4) throw ClassSizeError("at least 4 samples are required, got " + std::to_string(ds.n()));
  for (int c : {0, 1}) {
    if (ds.class_count(c) < 2) {
      throw ClassSizeError("class '" + ds.label_values()[static_cast<std::size_t>(c)] + "' has " +
                           std::to_string(ds.class_count(c)) + " sample(s); at least 2 are required");
    }
  }
}

/// Resolves a label column given by name or 0-based index; empty means last.
inline std::size_t resolve_column(const CsvTable& table, const std::string& spec) {
  if (table.header.empty()) throw ParseError("CSV has no header row");
  if (spec.empty()) return table.header.size() - 1;
  if (auto j = table.column_index(spec)) return *j;
  if (std::all_of(spec.begin(), spec.end(), [](unsigned char c) { return std::isdigit(c); })) {
    const auto j = static_cast<std::size_t>(std::stoull(spec));
    if (j < table.header.size()) return j;
  }
  throw ParseError("label column '" + spec + "' not found");
}

/// Builds a Dataset from a parsed CSV. Labels map to {0,1} by lexicographic
/// order of the two distinct raw values.
inline Dataset dataset_from_csv(const CsvTable& table, const std::string& label_spec = {}) {
  const std::size_t label_col = resolve_column(table, label_spec);
  std::set<std::string> distinct;
  for (const auto& r : table.rows) distinct.insert(std::string(detail::trim(r[label_col])));
  if (distinct.size() != 2) {
    throw LabelCardinalityError("label column '" + table.header[label_col] + "' must hold exactly 2 distinct values, found " +
                                std::to_string(distinct.size()));
  }
  const std::array<std::string, 2> label_values{*distinct.begin(), *std::next(distinct.begin())};

  FeatureTable t;
  t.n = table.rows.size();
  t.p = table.header.size() - 1;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j != label_col) t.names.push_back(table.header[j]);
  }
  t.values.reserve(t.n * t.p);
  std::vector<int> y;
  y.reserve(t.n);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j != label_col) t.values.push_back(parse_real(r[j], i, j));
    }
    y.push_back(detail::trim(r[label_col]) == label_values[0] ? 0 : 1);
  }
  Dataset ds(std::move(t), std::move(y), {}, label_values, table.header[label_col]);
  require_trainable(ds);
  return ds;
}

inline Dataset load_csv(const std::string& path, const std::string& label_spec = {}) {
  return dataset_from_csv(read_csv(path), label_spec);
}

/// Writes features followed by the raw label column.
inline void write_csv(const Dataset& ds, std::ostream& out) {
  for (const auto& name : ds.feature_names()) {
    write_csv_cell(out, name);
    out << ',';
  }
  write_csv_cell(out, ds.label_name());
  out << '\n';
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (double v : ds.row(i)) out << format_real(v) << ',';
    write_csv_cell(out, ds.label_values()[static_cast<std::size_t>(ds.label(i))]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Min-max scaling

struct Scaler {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t size() const { return min.size(); }
  bool is_constant(std::size_t j) const { return min[j] == max[j]; }

  /// Maps v to (v - min)/(max - min); constant features map to 0.
  double apply(std::size_t j, double v) const {
    if (is_constant(j)) return 0.0;
    return (v - min[j]) / (max[j] - min[j]);
  }

  /// Parameters for a subset of features, in the subset's order.
  Scaler restrict_to(const FeatureSet& m) const {
    Scaler out;
    for (std::size_t j : m) {
      out.min.push_back(min[j]);
      out.max.push_back(max[j]);
    }
    return out;
  }

  std::vector<std::size_t> constant_features() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < size(); ++j) {
      if (is_constant(j)) out.push_back(j);
    }
    return out;
  }
};

inline Scaler minmax_fit(const Dataset& ds) {
  Scaler sc;
  sc.min.assign(ds.p(), 0.0);
  sc.max.assign(ds.p(), 0.0);
  for (std::size_t j = 0; j < ds.p(); ++j) {
    if (ds.n() == 0) break;
    double lo = ds.at(0, j);
    double hi = lo;
    for (std::size_t i = 1; i < ds.n(); ++i) {
      lo = std::min(lo, ds.at(i, j));
      hi = std::max(hi, ds.at(i, j));
    }
    sc.min[j] = lo;
    sc.max[j] = hi;
  }
  return sc;
}

inline Dataset minmax_apply(const Scaler& sc, const Dataset& ds) {
  if (sc.size() != ds.p()) {
    throw DimensionError("scaler has " + std::to_string(sc.size()) + " features, dataset has " +
                         std::to_string(ds.p()));
  }
  std::vector<double> values(ds.features().values.size());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.p(); ++j) values[i * ds.p() + j] = sc.apply(j, ds.at(i, j));
  }
  return ds.with_values(std::move(values));
}

// ---------------------------------------------------------------------------
// Splitting

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::vector<std::size_t>> folds;
  std::uint64_t seed = 0;

  /// Every row not in fold f, ascending.
  std::vector<std::size_t> training_rows(std::size_t f) const {
    std::vector<std::size_t> rows;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) rows.insert(rows.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  }
};

namespace detail {

inline std::array<std::vector<std::size_t>, 2> shuffled_classes(const Dataset& ds, RandomStream& rng) {
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < ds.n(); ++i) by_class[static_cast<std::size_t>(ds.label(i))].push_back(i);
  for (auto& members : by_class) rng.shuffle(members.begin(), members.end());
  return by_class;
}

}  // namespace detail

/// Stratified k-fold partition. Class members are shuffled and dealt
/// round-robin; class 1 continues where class 0 stopped so fold sizes stay
/// within one of each other.
inline FoldPlan stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ContractError("k must be at least 2");
  for (int c : {0, 1}) {
    if (ds.class_count(c) < k) {
      throw ClassSizeError("class '" + ds.label_values()[static_cast<std::size_t>(c)] + "' has " +
                           std::to_string(ds.class_count(c)) + " samples, fewer than k=" + std::to_string(k));
    }
  }
  RandomStream rng(seed, "split");
  const auto by_class = detail::shuffled_classes(ds, rng);
  FoldPlan plan{k, std::vector<std::vector<std::size_t>>(k), seed};
  std::size_t next = 0;
  for (const auto& members : by_class) {
    for (std::size_t i : members) {
      plan.folds[next].push_back(i);
      next = (next + 1) % k;
    }
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

/// Stratified split; returns (train, test). Each class contributes
/// round(test_fraction * class_size) rows to the test part.
inline std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ContractError("test fraction must lie in (0, 1)");
  RandomStream rng(seed, "split");
  const auto by_class = detail::shuffled_classes(ds, rng);
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& members = by_class[c];
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
    if (members.size() - std::min(n_test, members.size()) < 2) {
      throw ClassSizeError("test fraction leaves class '" + ds.label_values()[c] +
                           "' with fewer than 2 training samples");
    }
    test.insert(test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.insert(train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {ds.subset(train), ds.subset(test)};
}

}  // namespace natlearn
