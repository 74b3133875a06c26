#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "natlearn/dataset.hpp"
#include "natlearn/metrics.hpp"
#include "natlearn/model_io.hpp"
#include "natlearn/predict.hpp"
#include "natlearn/train.hpp"

namespace natlearn {

struct BenchConfig {
  TrainConfig train;
  bool scale = false;
};

struct FoldRecord {
  std::size_t fold = 0;
  bool ok = false;
  std::string failure;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  ConfusionMatrix cm;
  double accuracy = 0.0;
  double f1 = 0.0;
  std::size_t train_error = 0;
  std::size_t features = 0;
  std::size_t iterations = 0;
  std::size_t prototype_s = 0;
  std::size_t prototype_o = 0;
  double feature_ratio = 0.0;
  double sample_ratio = 0.0;
  std::size_t model_bytes = 0;
  double train_seconds = 0.0;
  double predict_seconds_per_sample = 0.0;
  NLModel model;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  return s;
}

struct BenchReport {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  bool scaled = false;
  NeighborMode mode = NeighborMode::automatic;
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<FoldRecord> folds;

  std::size_t succeeded() const {
    return static_cast<std::size_t>(std::count_if(folds.begin(), folds.end(), [](const auto& f) { return f.ok; }));
  }

  template <typename Field>
  Summary summary(Field field) const {
    std::vector<double> xs;
    for (const auto& f : folds) {
      if (f.ok) xs.push_back(static_cast<double>(field(f)));
    }
    return summarize(xs);
  }
};

/// Stratified k-fold evaluation: train on k-1 folds, score the held-out fold.
/// A fold whose training fails is recorded and the run continues.
inline BenchReport bench_run(const Dataset& ds, std::size_t k, std::uint64_t seed, const BenchConfig& config) {
  const FoldPlan plan = stratified_folds(ds, k, seed);
  BenchReport report;
  report.k = k;
  report.seed = seed;
  report.scaled = config.scale;
  report.mode = config.train.mode;
  report.n = ds.n();
  report.p = ds.p();
  for (std::size_t f = 0; f < k; ++f) {
    FoldRecord rec;
    rec.fold = f;
    const auto train_rows = plan.training_rows(f);
    const Dataset train = ds.subset(train_rows);
    const Dataset test = ds.subset(plan.folds[f]);
    rec.n_train = train.n();
    rec.n_test = test.n();
    try {
      TrainConfig tc = config.train;
      tc.seed = seed;
      const auto t0 = std::chrono::steady_clock::now();
      auto trained = fit(train, tc, config.scale);
      rec.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rec.model = std::move(trained.model);

      std::vector<double> repeats;
      BatchResult batch;
      for (int rep = 0; rep < 3; ++rep) {
        const auto p0 = std::chrono::steady_clock::now();
        batch = predict_batch(rec.model, test);
        repeats.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - p0).count());
      }
      std::sort(repeats.begin(), repeats.end());
      rec.predict_seconds_per_sample = repeats[1] / static_cast<double>(std::max<std::size_t>(1, test.n()));

      rec.cm = confusion(test.labels(), batch.predicted);
      rec.accuracy = accuracy(rec.cm);
      rec.f1 = f_measure(rec.cm);
      rec.train_error = rec.model.meta.train_error;
      rec.features = rec.model.features.size();
      rec.iterations = rec.model.meta.iterations;
      rec.prototype_s = rec.model.proto_s.sample_id;
      rec.prototype_o = rec.model.proto_o.sample_id;
      const auto sp = sparsity_report(rec.model, train);
      rec.feature_ratio = sp.feature_ratio;
      rec.sample_ratio = sp.sample_ratio;
      rec.model_bytes = serialize_model(rec.model).size();
      rec.ok = true;
    } catch (const Error& e) {
      rec.failure = e.what();
    }
    report.folds.push_back(std::move(rec));
  }
  return report;
}

inline nlohmann::json summary_to_json(const Summary& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}};
}

/// JSON form of a report; timing fields are dropped when include_timing is false.
inline nlohmann::json bench_to_json(const BenchReport& r, bool include_timing = true) {
  using nlohmann::json;
  json folds = json::array();
  for (const auto& f : r.folds) {
    json jf = {{"fold", f.fold}, {"ok", f.ok}, {"n_train", f.n_train}, {"n_test", f.n_test}};
    if (!f.ok) {
      jf["failure"] = f.failure;
    } else {
      jf["accuracy"] = f.accuracy;
      jf["f1"] = f.f1;
      jf["confusion"] = {{"tp", f.cm.tp}, {"fp", f.cm.fp}, {"tn", f.cm.tn}, {"fn", f.cm.fn}};
      jf["train_error"] = f.train_error;
      jf["features"] = f.features;
      jf["feature_names"] = f.model.feature_names;
      jf["iterations"] = f.iterations;
      jf["prototype_ids"] = {f.prototype_s, f.prototype_o};
      jf["feature_ratio"] = f.feature_ratio;
      jf["sample_ratio"] = f.sample_ratio;
      jf["model_bytes"] = f.model_bytes;
      if (include_timing) {
        jf["train_seconds"] = f.train_seconds;
        jf["predict_seconds_per_sample"] = f.predict_seconds_per_sample;
      }
    }
    folds.push_back(std::move(jf));
  }
  json summary = {
      {"succeeded", r.succeeded()},
      {"accuracy", summary_to_json(r.summary([](const FoldRecord& f) { return f.accuracy; }))},
      {"f1", summary_to_json(r.summary([](const FoldRecord& f) { return f.f1; }))},
      {"features", summary_to_json(r.summary([](const FoldRecord& f) { return f.features; }))},
      {"iterations", summary_to_json(r.summary([](const FoldRecord& f) { return f.iterations; }))},
      {"feature_ratio", summary_to_json(r.summary([](const FoldRecord& f) { return f.feature_ratio; }))},
      {"sample_ratio", summary_to_json(r.summary([](const FoldRecord& f) { return f.sample_ratio; }))},
      {"model_bytes", summary_to_json(r.summary([](const FoldRecord& f) { return f.model_bytes; }))},
  };
  if (include_timing) {
    summary["train_seconds"] = summary_to_json(r.summary([](const FoldRecord& f) { return f.train_seconds; }));
    summary["predict_seconds_per_sample"] =
        summary_to_json(r.summary([](const FoldRecord& f) { return f.predict_seconds_per_sample; }));
  }
  return {{"k", r.k},           {"seed", r.seed},   {"scaled", r.scaled}, {"neighbor_mode", to_string(r.mode)},
          {"n", r.n},           {"p", r.p},         {"folds", folds},     {"summary", summary}};
}

inline std::string bench_table(const BenchReport& r) {
  std::ostringstream out;
  out << "k=" << r.k << " seed=" << r.seed << " scaled=" << (r.scaled ? "yes" : "no") << " n=" << r.n
      << " p=" << r.p << "\n";
  out << std::left << std::setw(6) << "fold" << std::setw(10) << "accuracy" << std::setw(10) << "f1"
      << std::setw(8) << "|M|" << std::setw(6) << "L" << std::setw(10) << "train_err" << std::setw(12)
      << "train_s" << "predict_us/sample\n";
  out << std::fixed;
  for (const auto& f : r.folds) {
    out << std::setw(6) << f.fold;
    if (!f.ok) {
      out << "FAILED: " << f.failure << "\n";
      continue;
    }
    out << std::setw(10) << std::setprecision(4) << f.accuracy << std::setw(10) << f.f1 << std::setw(8)
        << f.features << std::setw(6) << f.iterations << std::setw(10) << f.train_error << std::setw(12)
        << std::setprecision(3) << f.train_seconds << std::setprecision(3)
        << f.predict_seconds_per_sample * 1e6 << "\n";
  }
  const auto acc = r.summary([](const FoldRecord& f) { return f.accuracy; });
  const auto f1 = r.summary([](const FoldRecord& f) { return f.f1; });
  const auto feats = r.summary([](const FoldRecord& f) { return f.feature_ratio; });
  out << std::setprecision(4) << "mean accuracy " << acc.mean << " (std " << acc.std << "), mean f1 " << f1.mean
      << " (std " << f1.std << "), mean feature ratio " << feats.mean << ", folds ok " << r.succeeded() << "/"
      << r.folds.size() << "\n";
  return out.str();
}

}  // namespace natlearn
