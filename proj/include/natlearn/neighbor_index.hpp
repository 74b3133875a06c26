#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "natlearn/dataset.hpp"
#include "natlearn/error.hpp"
#include "natlearn/random.hpp"

namespace natlearn {

enum class NeighborMode { automatic, exact, lsh };
enum class ClassConstraint { same, opposite };

inline const char* to_string(NeighborMode m) {
  switch (m) {
    case NeighborMode::exact: return "exact";
    case NeighborMode::lsh: return "lsh";
    default: return "auto";
  }
}

/// Exact search up to this many samples, LSH above.
inline constexpr std::size_t kExactModeMaxSamples = 2000;

inline NeighborMode resolve_mode(NeighborMode m, std::size_t n) {
  if (m != NeighborMode::automatic) return m;
  return n <= kExactModeMaxSamples ? NeighborMode::exact : NeighborMode::lsh;
}

/// p-stable (Gaussian) LSH parameters. bucket_width <= 0 selects the width
/// automatically from the data.
struct LshParams {
  std::size_t num_tables = 8;
  std::size_t hashes_per_table = 4;
  double bucket_width = 0.0;
};

/// Distance evaluations spent by queries versus a full scan.
struct QueryCost {
  std::size_t scanned = 0;
  std::size_t exhaustive = 0;

  QueryCost& operator+=(const QueryCost& o) {
    scanned += o.scanned;
    exhaustive += o.exhaustive;
    return *this;
  }
  double skip_ratio() const {
    return exhaustive == 0 ? 0.0 : 1.0 - static_cast<double>(scanned) / static_cast<double>(exhaustive);
  }
};

namespace detail {

inline double squared_distance(const double* a, const double* b, std::size_t len) {
  double sum = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return sum;
}

inline std::vector<double> project(const Dataset& ds, const FeatureSet& m) {
  std::vector<double> out(ds.n() * m.size());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t k = 0; k < m.size(); ++k) out[i * m.size() + k] = ds.at(i, m[k]);
  }
  return out;
}

inline bool satisfies(const Dataset& ds, std::size_t query, std::size_t j, ClassConstraint c) {
  if (j == query) return false;
  return (ds.label(j) == ds.label(query)) == (c == ClassConstraint::same);
}

// Full scan over a projected matrix; ties go to the lowest index.
inline std::size_t scan_nearest(const Dataset& ds, const std::vector<double>& proj, std::size_t width,
                                std::size_t query, ClassConstraint c) {
  const double* q = proj.data() + query * width;
  std::size_t best = ds.n();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < ds.n(); ++j) {
    if (!satisfies(ds, query, j, c)) continue;
    const double d = squared_distance(q, proj.data() + j * width, width);
    if (d < best_d || best == ds.n()) {
      best = j;
      best_d = d;
    }
  }
  return best;
}

}  // namespace detail

/// Nearest sample to row i under a class constraint, by Euclidean distance over
/// `active`. Ties resolve to the lowest index.
inline std::size_t exact_nearest(const Dataset& ds, std::size_t i, ClassConstraint c, const FeatureSet& active) {
  check_feature_set(active, ds.p());
  if (i >= ds.n()) throw ContractError("query index out of range");
  const auto proj = detail::project(ds, active);
  const auto j = detail::scan_nearest(ds, proj, active.size(), i, c);
  if (j == ds.n()) throw ContractError("no sample satisfies the class constraint for query " + std::to_string(i));
  return j;
}

/// Class-constrained nearest-neighbor index over a feature subset.
///
/// Holds a pointer to the Dataset it was built from; the Dataset must outlive
/// the index. Immutable after build, so concurrent queries are safe.
class NeighborIndex {
 public:
  static NeighborIndex build(const Dataset& ds, FeatureSet active, NeighborMode mode, std::uint64_t seed,
                             LshParams params = {}) {
    check_feature_set(active, ds.p());
    NeighborIndex ix;
    ix.ds_ = &ds;
    ix.active_ = std::move(active);
    ix.mode_ = resolve_mode(mode, ds.n());
    ix.seed_ = seed;
    ix.params_ = params;
    ix.proj_ = detail::project(ds, ix.active_);
    if (ix.mode_ == NeighborMode::lsh) ix.build_tables();
    return ix;
  }

  NeighborMode mode() const { return mode_; }
  const FeatureSet& active_features() const { return active_; }
  const LshParams& lsh_params() const { return params_; }
  double bucket_width() const { return width_; }
  std::uint64_t seed() const { return seed_; }

  /// Row-major n x |M| copy of the data restricted to the active features.
  const std::vector<double>& projected() const { return proj_; }

  std::size_t nearest_same_class(std::size_t i, QueryCost* cost = nullptr) const {
    return nearest(i, ClassConstraint::same, cost);
  }

  std::size_t nearest_opposite_class(std::size_t i, QueryCost* cost = nullptr) const {
    return nearest(i, ClassConstraint::opposite, cost);
  }

  std::size_t nearest(std::size_t i, ClassConstraint c, QueryCost* cost = nullptr) const {
    const Dataset& ds = *ds_;
    if (i >= ds.n()) throw ContractError("query index out of range");
    const std::size_t pool =
        c == ClassConstraint::same ? ds.class_count(ds.label(i)) - 1 : ds.class_count(1 - ds.label(i));
    if (pool == 0) {
      throw ClassSizeError(std::string("no ") + (c == ClassConstraint::same ? "same" : "opposite") +
                           "-class neighbor exists for sample " + std::to_string(i));
    }
    if (cost) cost->exhaustive += pool;
    if (mode_ == NeighborMode::lsh) {
      if (auto j = bucket_nearest(i, c, cost)) return *j;
    }
    if (cost) cost->scanned += pool;
    return detail::scan_nearest(ds, proj_, active_.size(), i, c);
  }

  /// Bucket key of sample i in table t (lsh mode only).
  std::uint64_t bucket_key(std::size_t t, std::size_t i) const { return keys_[t][i]; }

 private:
  NeighborIndex() = default;

  std::uint64_t hash_point(std::size_t t, const double* x) const {
    const std::size_t width = active_.size();
    std::uint64_t key = 0x2545f4914f6cdd1dULL;
    for (std::size_t h = 0; h < params_.hashes_per_table; ++h) {
      const std::size_t f = t * params_.hashes_per_table + h;
      const double* a = directions_.data() + f * width;
      double dot = offsets_[f];
      for (std::size_t k = 0; k < width; ++k) dot += a[k] * x[k];
      const auto slot = static_cast<std::int64_t>(std::floor(dot / width_));
      key = splitmix64(key ^ static_cast<std::uint64_t>(slot));
    }
    return key;
  }

  // 4x the median class-constrained nearest-neighbor distance over a seeded
  // sample of pivots, so true neighbors collide with high probability.
  double estimate_width() const {
    const Dataset& ds = *ds_;
    RandomStream rng(seed_, "lsh-width");
    std::vector<std::size_t> pivots(ds.n());
    std::iota(pivots.begin(), pivots.end(), std::size_t{0});
    rng.shuffle(pivots.begin(), pivots.end());
    pivots.resize(std::min<std::size_t>(pivots.size(), 64));
    std::vector<double> dists;
    for (std::size_t i : pivots) {
      for (auto c : {ClassConstraint::same, ClassConstraint::opposite}) {
        const auto j = detail::scan_nearest(ds, proj_, active_.size(), i, c);
        if (j == ds.n()) continue;
        dists.push_back(std::sqrt(detail::squared_distance(proj_.data() + i * active_.size(),
                                                           proj_.data() + j * active_.size(), active_.size())));
      }
    }
    if (dists.empty()) return 1.0;
    auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    return *mid > 0.0 ? 4.0 * *mid : 1.0;
  }

  void build_tables() {
    if (params_.num_tables == 0 || params_.hashes_per_table == 0) {
      throw ContractError("LSH needs at least one table and one hash per table");
    }
    const std::size_t width = active_.size();
    width_ = params_.bucket_width > 0.0 ? params_.bucket_width : estimate_width();
    RandomStream rng(seed_, "lsh");
    const std::size_t functions = params_.num_tables * params_.hashes_per_table;
    directions_.resize(functions * width);
    offsets_.resize(functions);
    for (std::size_t f = 0; f < functions; ++f) {
      for (std::size_t k = 0; k < width; ++k) directions_[f * width + k] = rng.normal();
      offsets_[f] = rng.uniform() * width_;
    }
    const std::size_t n = ds_->n();
    keys_.assign(params_.num_tables, std::vector<std::uint64_t>(n));
    buckets_.assign(params_.num_tables, {});
    for (std::size_t t = 0; t < params_.num_tables; ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        keys_[t][i] = hash_point(t, proj_.data() + i * width);
        buckets_[t][keys_[t][i]].push_back(i);
      }
    }
  }

  std::optional<std::size_t> bucket_nearest(std::size_t i, ClassConstraint c, QueryCost* cost) const {
    const Dataset& ds = *ds_;
    const std::size_t width = active_.size();
    std::vector<std::size_t> candidates;
    for (std::size_t t = 0; t < params_.num_tables; ++t) {
      const auto& bucket = buckets_[t].at(keys_[t][i]);
      for (std::size_t j : bucket) {
        if (detail::satisfies(ds, i, j, c)) candidates.push_back(j);
      }
    }
    if (candidates.empty()) return std::nullopt;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (cost) cost->scanned += candidates.size();
    const double* q = proj_.data() + i * width;
    std::size_t best = candidates.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j : candidates) {
      const double d = detail::squared_distance(q, proj_.data() + j * width, width);
      if (d < best_d) {
        best = j;
        best_d = d;
      }
    }
    return best;
  }

  const Dataset* ds_ = nullptr;
  FeatureSet active_;
  NeighborMode mode_ = NeighborMode::exact;
  std::uint64_t seed_ = 0;
  LshParams params_;
  double width_ = 0.0;
  std::vector<double> proj_;
  std::vector<double> directions_;
  std::vector<double> offsets_;
  std::vector<std::vector<std::uint64_t>> keys_;
  std::vector<std::unordered_map<std::uint64_t, std::vector<std::size_t>>> buckets_;
};

}  // namespace natlearn
