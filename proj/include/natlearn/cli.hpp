#pragma once

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "natlearn/bench.hpp"
#include "natlearn/csv.hpp"
#include "natlearn/dataset.hpp"
#include "natlearn/explain.hpp"
#include "natlearn/metrics.hpp"
#include "natlearn/model_io.hpp"
#include "natlearn/oracle.hpp"
#include "natlearn/predict.hpp"
#include "natlearn/train.hpp"

namespace natlearn::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kTrainingFailure = 2 };

enum class LogLevel { error, info, debug };

class Logger {
 public:
  Logger(std::ostream& err, LogLevel level) : err_(err), level_(level) {}
  void error(const std::string& msg) const { err_ << "error: " << msg << "\n"; }
  void info(const std::string& msg) const {
    if (level_ >= LogLevel::info) err_ << msg << "\n";
  }
  void debug(const std::string& msg) const {
    if (level_ >= LogLevel::debug) err_ << "debug: " << msg << "\n";
  }

 private:
  std::ostream& err_;
  LogLevel level_;
};

/// Options shared by the commands that train.
struct TrainOptions {
  std::string nn = "auto";
  std::size_t lsh_tables = 8;
  std::size_t lsh_hashes = 4;
  double lsh_width = 0.0;
  std::uint64_t seed = 42;
  std::size_t level_cap = 64;

  TrainConfig config(std::size_t threads) const {
    TrainConfig c;
    c.mode = nn == "exact" ? NeighborMode::exact : nn == "lsh" ? NeighborMode::lsh : NeighborMode::automatic;
    c.lsh = {lsh_tables, lsh_hashes, lsh_width};
    c.seed = seed;
    c.threads = threads;
    c.level_cap = level_cap;
    return c;
  }
};

inline void add_train_options(CLI::App* cmd, TrainOptions& o) {
  cmd->add_option("--nn", o.nn, "Neighbor search: auto (exact up to 2000 samples), exact or lsh")
      ->check(CLI::IsMember({"auto", "exact", "lsh"}));
  cmd->add_option("--lsh-tables", o.lsh_tables, "LSH hash tables")->check(CLI::PositiveNumber);
  cmd->add_option("--lsh-hashes", o.lsh_hashes, "LSH hash functions per table")->check(CLI::PositiveNumber);
  cmd->add_option("--lsh-width", o.lsh_width, "LSH bucket width (0: estimate from data)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", o.seed, "Seed for every random stream");
  cmd->add_option("--level-cap", o.level_cap, "Maximum training levels")->check(CLI::PositiveNumber);
}

/// Reads the named columns of a CSV as reals, in the given order.
inline FeatureTable select_columns(const CsvTable& table, const std::vector<std::string>& names) {
  std::vector<std::size_t> cols;
  std::string missing;
  for (const auto& name : names) {
    if (auto j = table.column_index(name)) {
      cols.push_back(*j);
    } else {
      missing += (missing.empty() ? "" : ", ") + name;
    }
  }
  if (!missing.empty()) throw DimensionError("input is missing model features: " + missing);
  FeatureTable t;
  t.n = table.rows.size();
  t.p = cols.size();
  t.names = names;
  t.values.reserve(t.n * t.p);
  for (std::size_t i = 0; i < t.n; ++i) {
    for (std::size_t j : cols) t.values.push_back(parse_real(table.rows[i][j], i, j));
  }
  return t;
}

inline std::string created_at_default() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    const std::time_t t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }
  return "";
}

inline nlohmann::json prototype_json(const Dataset& ds, std::size_t row, const FeatureSet& subset) {
  std::vector<double> values;
  for (std::size_t j : subset) values.push_back(ds.at(row, j));
  return {{"index", row},
          {"sample_id", ds.sample_id(row)},
          {"label", ds.label(row)},
          {"label_value", ds.label_values()[static_cast<std::size_t>(ds.label(row))]},
          {"values", values}};
}

inline NLModel oracle_model(const Dataset& ds, const OracleResult& r) {
  return model_from_candidate(ds, CandidatePrototype{r.s, r.s, r.o, r.subset, r.error});
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Natural Learning: two-prototype sparse classifier"};
  app.name("nl");
  app.require_subcommand(1);
  app.fallthrough();

  std::size_t threads = 0;
  if (const char* env = std::getenv("NL_THREADS")) threads = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
  std::string log_level = "info";
  app.add_option("--threads", threads, "Worker threads (default: NL_THREADS or all cores)");
  app.add_option("--log-level", log_level, "error, info or debug")->check(CLI::IsMember({"error", "info", "debug"}));

  std::string input;
  std::string label;
  std::string output;
  std::string model_path;
  std::string sample_path;
  std::string created_at = created_at_default();
  std::string scaling = "off";
  std::string format = "table";
  std::string json_path;
  bool scale = false;
  std::size_t folds = 10;
  std::size_t min_subset = 1;
  std::size_t max_subset = 0;
  double test_fraction = 0.0;
  OracleLimits limits;
  TrainOptions topt;

  auto* train = app.add_subcommand("train", "Train a model from a labeled CSV");
  train->add_option("--input", input, "Training CSV")->required();
  train->add_option("--label", label, "Label column name or 0-based index (default: last)");
  train->add_flag("--scale", scale, "Min-max scale features before training");
  train->add_option("--output", output, "Model file to write")->required();
  train->add_option("--created-at", created_at, "Timestamp recorded in the model (default: SOURCE_DATE_EPOCH or empty)");
  add_train_options(train, topt);

  auto* predict = app.add_subcommand("predict", "Predict labels for a CSV");
  predict->add_option("--model", model_path, "Model file")->required();
  predict->add_option("--input", input, "CSV with the model's feature columns")->required();
  predict->add_option("--output", output, "Prediction CSV to write")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on a labeled CSV");
  evaluate->add_option("--model", model_path, "Model file")->required();
  evaluate->add_option("--input", input, "Labeled CSV")->required();
  evaluate->add_option("--label", label, "Label column name or 0-based index (default: last)");

  auto* bench = app.add_subcommand("bench", "Stratified k-fold benchmark");
  bench->add_option("--input", input, "Labeled CSV")->required();
  bench->add_option("--label", label, "Label column name or 0-based index (default: last)");
  bench->add_option("--folds", folds, "Number of folds")->check(CLI::Range(2, 1000));
  bench->add_flag("--scale", scale, "Same as --scaling on");
  bench->add_option("--scaling", scaling, "off, on or both")->check(CLI::IsMember({"off", "on", "both"}));
  bench->add_option("--format", format, "stdout format: table or json")->check(CLI::IsMember({"table", "json"}));
  bench->add_option("--json", json_path, "Also write the JSON report to this file");
  add_train_options(bench, topt);

  auto* explain_cmd = app.add_subcommand("explain", "Print a model card");
  explain_cmd->add_option("--model", model_path, "Model file")->required();
  explain_cmd->add_option("--sample", sample_path, "CSV (header + one row) to explain");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive pair x subset search (small data only)");
  oracle->add_option("--input", input, "Labeled CSV")->required();
  oracle->add_option("--label", label, "Label column name or 0-based index (default: last)");
  oracle->add_option("--min-subset", min_subset, "Smallest subset size")->check(CLI::PositiveNumber);
  oracle->add_option("--max-subset", max_subset, "Largest subset size (default: p)");
  oracle->add_option("--max-n", limits.max_n, "Sample limit of the size guard");
  oracle->add_option("--max-p", limits.max_p, "Feature limit of the size guard");
  oracle->add_option("--test-fraction", test_fraction,
                     "Hold out this stratified fraction and report the rule's test accuracy")
      ->check(CLI::Range(0.0, 1.0));
  oracle->add_option("--seed", topt.seed, "Seed for the held-out split");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  const Logger log(err, log_level == "error" ? LogLevel::error
                        : log_level == "debug" ? LogLevel::debug
                                               : LogLevel::info);
  try {
    if (*train) {
      const Dataset ds = load_csv(input, label);
      log.debug("loaded " + std::to_string(ds.n()) + " x " + std::to_string(ds.p()) + " from " + input);
      auto result = fit(ds, topt.config(threads), scale);
      result.model.meta.created_at = created_at;
      save_model(result.model, output);
      const auto& st = result.stats;
      out << "mode: " << to_string(st.mode) << "\n";
      for (std::size_t l = 0; l < st.levels.size(); ++l) {
        const auto& rec = st.levels[l];
        out << "level " << l + 1 << ": |M| " << rec.features_in;
        if (rec.found) {
          out << " -> " << rec.features_out << ", error " << rec.error << ", pivot " << rec.pivot;
        } else {
          out << " -> no candidate";
        }
        out << ", lsh skip " << rec.lsh_skip_ratio << ", " << rec.seconds << " s\n";
      }
      const auto& m = result.model;
      out << "iterations: " << st.iterations << "\n";
      out << "features: " << m.features.size() << " (";
      for (std::size_t k = 0; k < m.feature_names.size(); ++k) out << (k ? ", " : "") << m.feature_names[k];
      out << ")\n";
      out << "prototypes: #" << m.proto_s.sample_id << " (" << m.label_values[m.proto_s.label] << "), #"
          << m.proto_o.sample_id << " (" << m.label_values[m.proto_o.label] << ")\n";
      out << "train_error: " << m.meta.train_error << " of " << m.meta.n << "\n";
      return kSuccess;
    }

    if (*predict) {
      const NLModel model = load_model(model_path);
      const CsvTable table = read_csv(input);
      std::vector<Prediction> preds;
      if (!table.header.empty()) preds = predict_batch(model, select_columns(table, model.feature_names));
      std::ofstream file(output);
      if (!file) throw ParseError("cannot write '" + output + "'");
      file << "sample_id,predicted_label,d_s,d_o\n";
      for (std::size_t i = 0; i < preds.size(); ++i) {
        file << i << ',' << preds[i].label << ',' << format_real(preds[i].d_s) << ','
             << format_real(preds[i].d_o) << '\n';
      }
      log.info("wrote " + std::to_string(preds.size()) + " predictions to " + output);
      return kSuccess;
    }

    if (*evaluate) {
      const NLModel model = load_model(model_path);
      const CsvTable table = read_csv(input);
      const std::size_t label_col = resolve_column(table, label);
      const FeatureTable features = select_columns(table, model.feature_names);
      std::vector<int> y;
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto raw = detail::trim(table.rows[i][label_col]);
        if (raw == model.label_values[0]) {
          y.push_back(0);
        } else if (raw == model.label_values[1]) {
          y.push_back(1);
        } else {
          throw ParseError("label '" + std::string(raw) + "' is not one of the model's labels", i, label_col);
        }
      }
      std::vector<int> yhat;
      for (const auto& pr : predict_batch(model, features)) yhat.push_back(pr.label);
      const auto cm = confusion(y, yhat);
      const nlohmann::json j = {{"n", cm.total()},
                                {"accuracy", accuracy(cm)},
                                {"f1", f_measure(cm)},
                                {"errors", cm.fp + cm.fn},
                                {"confusion", {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}}}};
      out << j.dump(2) << "\n";
      return kSuccess;
    }

    if (*bench) {
      const Dataset ds = load_csv(input, label);
      if (scale) scaling = "on";
      std::vector<bool> modes;
      if (scaling != "on") modes.push_back(false);
      if (scaling != "off") modes.push_back(true);
      nlohmann::json runs = nlohmann::json::array();
      bool all_ok = true;
      for (bool scaled : modes) {
        BenchConfig bc{topt.config(threads), scaled};
        const auto report = bench_run(ds, folds, topt.seed, bc);
        if (report.succeeded() == 0) all_ok = false;
        for (const auto& f : report.folds) {
          if (!f.ok) log.error("fold " + std::to_string(f.fold) + ": " + f.failure);
        }
        if (format == "table") out << bench_table(report);
        runs.push_back(bench_to_json(report));
      }
      const nlohmann::json doc = {{"runs", runs}};
      if (format == "json") out << doc.dump(2) << "\n";
      if (!json_path.empty()) {
        std::ofstream file(json_path);
        if (!file) throw ParseError("cannot write '" + json_path + "'");
        file << doc.dump(2) << "\n";
      }
      return all_ok ? kSuccess : kTrainingFailure;
    }

    if (*explain_cmd) {
      const NLModel model = load_model(model_path);
      if (sample_path.empty()) {
        out << explain(model);
        return kSuccess;
      }
      const CsvTable table = read_csv(sample_path);
      if (table.rows.empty()) throw ParseError("sample file has no data row");
      const FeatureTable x = select_columns(table, model.feature_names);
      out << explain(model, x.row(0));
      return kSuccess;
    }

    if (*oracle) {
      const Dataset full = load_csv(input, label);
      Dataset train = full;
      std::optional<Dataset> test;
      if (test_fraction > 0.0) {
        auto [tr, te] = train_test_split(full, test_fraction, topt.seed);
        train = std::move(tr);
        test = std::move(te);
      }
      const std::size_t max_k = max_subset == 0 ? train.p() : max_subset;
      const auto r = oracle_search(train, min_subset, max_k, limits, resolve_threads(threads));
      nlohmann::json names = nlohmann::json::array();
      for (std::size_t j : r.subset) names.push_back(train.feature_names()[j]);
      nlohmann::json j = {{"error", r.error},
                          {"subset", r.subset},
                          {"subset_names", names},
                          {"s", prototype_json(train, r.s, r.subset)},
                          {"o", prototype_json(train, r.o, r.subset)},
                          {"ties", r.ties},
                          {"n", train.n()},
                          {"p", train.p()},
                          {"train_accuracy", 1.0 - static_cast<double>(r.error) / static_cast<double>(train.n())}};
      if (test) {
        const auto batch = predict_batch(oracle_model(train, r), *test);
        j["test_n"] = test->n();
        j["test_errors"] = batch.errors;
        j["test_accuracy"] = accuracy(confusion(test->labels(), batch.predicted));
      }
      out << j.dump(2) << "\n";
      return kSuccess;
    }
  } catch (const TrainingError& e) {
    log.error(e.what());
    return kTrainingFailure;
  } catch (const Error& e) {
    log.error(e.what());
    return kUsage;
  }
  return kUsage;
}

}  // namespace natlearn::cli
