#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "natlearn/dataset.hpp"
#include "natlearn/error.hpp"
#include "natlearn/model.hpp"
#include "natlearn/neighbor_index.hpp"
#include "natlearn/parallel.hpp"
#include "natlearn/predict.hpp"
#include "natlearn/random.hpp"

namespace natlearn {

struct Triplet {
  std::size_t pivot = 0;
  std::size_t same = 0;
  std::size_t opposite = 0;
};

/// Per-feature comparison of a pivot against its two neighbors.
struct FeatureComparison {
  std::vector<double> v_s;  // |x_s - x_i|
  std::vector<double> v_o;  // |x_o - x_i|
  std::vector<double> v;    // v_o - v_s
  FeatureSet kept;          // features with v > 0
};

/// Compares aligned vectors over m; kept holds the entries of m whose
/// difference v_o - v_s is strictly positive.
inline FeatureComparison compare_features(std::span<const double> x_i, std::span<const double> x_s,
                                          std::span<const double> x_o, const FeatureSet& m) {
  const std::size_t len = m.size();
  if (x_i.size() != len || x_s.size() != len || x_o.size() != len) {
    throw DimensionError("compare_features: vectors must align with the feature set");
  }
  FeatureComparison fc;
  fc.v_s.resize(len);
  fc.v_o.resize(len);
  fc.v.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    fc.v_s[k] = std::abs(x_s[k] - x_i[k]);
    fc.v_o[k] = std::abs(x_o[k] - x_i[k]);
    fc.v[k] = fc.v_o[k] - fc.v_s[k];
    if (fc.v[k] > 0.0) fc.kept.push_back(m[k]);
  }
  return fc;
}

struct CandidatePrototype {
  std::size_t pivot = 0;
  std::size_t s = 0;
  std::size_t o = 0;
  FeatureSet features;
  std::size_t error = 0;
};

/// Misclassification count over every row of ds when predicting with
/// prototypes s and o over features c. Stops counting once `stop_at` errors
/// are reached (the return value is then >= stop_at).
inline std::size_t evaluate_candidate(const Dataset& ds, std::size_t s, std::size_t o, const FeatureSet& c,
                                      std::size_t stop_at = std::numeric_limits<std::size_t>::max()) {
  if (c.empty()) throw ContractError("candidate feature set is empty");
  const std::size_t m = c.size();
  std::vector<double> ps(m);
  std::vector<double> po(m);
  for (std::size_t k = 0; k < m; ++k) {
    ps[k] = ds.at(s, c[k]);
    po[k] = ds.at(o, c[k]);
  }
  const int label_s = ds.label(s);
  const int label_o = ds.label(o);
  std::vector<double> z(m);
  std::size_t errors = 0;
  for (std::size_t r = 0; r < ds.n(); ++r) {
    const auto row = ds.row(r);
    for (std::size_t k = 0; k < m; ++k) z[k] = row[c[k]];
    const auto pred = decide(aligned_distance(z.data(), ps.data(), m), aligned_distance(z.data(), po.data(), m),
                             label_s, label_o);
    if (pred.label != ds.label(r) && ++errors >= stop_at) break;
  }
  return errors;
}

struct LevelOutcome {
  std::optional<CandidatePrototype> best;
  std::size_t max_kept = 0;
  std::size_t evaluated = 0;  // pivots whose candidate passed the |C| > 1 floor
  QueryCost cost;
};

/// One pass over all pivots with a fixed feature set m.
///
/// A candidate replaces the current best only on strictly lower error, so the
/// lowest pivot wins among equal errors. Pivot ranges are split across
/// workers and reduced by (error, pivot), which gives the same winner for any
/// worker count.
inline LevelOutcome train_level(const Dataset& ds, const FeatureSet& m, const NeighborIndex& ix,
                                std::size_t threads = 1) {
  if (ix.active_features() != m) throw ContractError("neighbor index was built over a different feature set");
  const std::size_t width = m.size();
  const auto& proj = ix.projected();
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, ds.n()));
  std::vector<LevelOutcome> partial(workers);

  parallel_chunks(ds.n(), workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
    LevelOutcome& local = partial[w];
    std::size_t best_error = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t s = ix.nearest_same_class(i, &local.cost);
      const std::size_t o = ix.nearest_opposite_class(i, &local.cost);
      auto fc = compare_features({proj.data() + i * width, width}, {proj.data() + s * width, width},
                                 {proj.data() + o * width, width}, m);
      local.max_kept = std::max(local.max_kept, fc.kept.size());
      if (fc.kept.size() <= 1) continue;
      ++local.evaluated;
      const std::size_t e = evaluate_candidate(ds, s, o, fc.kept, best_error);
      if (e < best_error) {
        best_error = e;
        local.best = CandidatePrototype{i, s, o, std::move(fc.kept), e};
      }
    }
  });

  LevelOutcome out;
  for (auto& part : partial) {
    out.max_kept = std::max(out.max_kept, part.max_kept);
    out.evaluated += part.evaluated;
    out.cost += part.cost;
    if (!part.best) continue;
    if (!out.best || part.best->error < out.best->error ||
        (part.best->error == out.best->error && part.best->pivot < out.best->pivot)) {
      out.best = std::move(part.best);
    }
  }
  return out;
}

struct TrainConfig {
  NeighborMode mode = NeighborMode::automatic;
  LshParams lsh;
  std::uint64_t seed = 42;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::size_t level_cap = 64;
};

struct LevelRecord {
  std::size_t features_in = 0;      // |M| searched at this level
  std::size_t features_out = 0;     // |C_best|, 0 when no candidate
  std::size_t error = 0;
  std::size_t pivot = 0;
  bool found = false;
  std::size_t max_kept = 0;
  double seconds = 0.0;
  double lsh_skip_ratio = 0.0;
};

struct TrainStats {
  std::size_t iterations = 0;
  NeighborMode mode = NeighborMode::exact;
  std::vector<LevelRecord> levels;
};

struct TrainResult {
  NLModel model;
  TrainStats stats;
};

inline NLModel model_from_candidate(const Dataset& ds, const CandidatePrototype& c) {
  NLModel model;
  model.features = c.features;
  for (std::size_t j : c.features) model.feature_names.push_back(ds.feature_names()[j]);
  model.proto_s = {ds.sample_id(c.s), ds.label(c.s), {}};
  model.proto_o = {ds.sample_id(c.o), ds.label(c.o), {}};
  for (std::size_t j : c.features) {
    model.proto_s.values.push_back(ds.at(c.s, j));
    model.proto_o.values.push_back(ds.at(c.o, j));
  }
  model.label_values = ds.label_values();
  model.meta.train_error = c.error;
  model.meta.n = ds.n();
  model.meta.p = ds.p();
  return model;
}

/// Recursive prototype search.
///
/// Level 0 searches all features. Each later level rebuilds the neighbor
/// index over the previous winner's features; training stops when the winning
/// feature set equals the searched one, when a level yields no candidate (the
/// previous winner stands), or at config.level_cap levels.
inline TrainResult nl_train(const Dataset& ds, const TrainConfig& config = {}) {
  require_trainable(ds);
  if (config.level_cap == 0) throw ContractError("level cap must be positive");
  const std::size_t threads = resolve_threads(config.threads);

  TrainStats stats;
  stats.mode = resolve_mode(config.mode, ds.n());
  FeatureSet m = all_features(ds.p());
  std::optional<CandidatePrototype> winner;

  for (std::size_t level = 0; level < config.level_cap; ++level) {
    const auto start = std::chrono::steady_clock::now();
    const auto ix = NeighborIndex::build(ds, m, stats.mode, splitmix64(config.seed + level), config.lsh);
    auto outcome = train_level(ds, m, ix, threads);
    LevelRecord rec;
    rec.features_in = m.size();
    rec.max_kept = outcome.max_kept;
    rec.lsh_skip_ratio = outcome.cost.skip_ratio();
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (outcome.best) {
      rec.found = true;
      rec.features_out = outcome.best->features.size();
      rec.error = outcome.best->error;
      rec.pivot = outcome.best->pivot;
    }
    stats.levels.push_back(rec);
    stats.iterations = level + 1;

    if (!outcome.best) {
      if (!winner) {
        throw TrainingError("no pivot kept more than one feature (largest kept set: " +
                            std::to_string(outcome.max_kept) + ")");
      }
      break;
    }
    const bool unchanged = outcome.best->features == m;
    winner = std::move(outcome.best);
    if (unchanged) break;
    m = winner->features;
  }

  TrainResult result{model_from_candidate(ds, *winner), std::move(stats)};
  result.model.meta.iterations = result.stats.iterations;
  result.model.meta.seed = config.seed;
  return result;
}

/// Trains on ds, optionally min-max scaling it first. The fitted scaler is
/// kept in the model (restricted to its features) so the model applies to
/// unscaled rows.
inline TrainResult fit(const Dataset& ds, const TrainConfig& config = {}, bool scale = false) {
  if (!scale) return nl_train(ds, config);
  const Scaler sc = minmax_fit(ds);
  auto result = nl_train(minmax_apply(sc, ds), config);
  result.model.scaler = sc.restrict_to(result.model.features);
  return result;
}

}  // namespace natlearn
