#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "natlearn/model_io.hpp"
#include "natlearn/train.hpp"
#include "support/test_support.hpp"

namespace natlearn {
namespace {

TrainConfig exact_config(std::size_t threads = 1) {
  TrainConfig c;
  c.mode = NeighborMode::exact;
  c.threads = threads;
  return c;
}

TEST(CompareFeatures, PrunesHarmfulFeature) {
  const std::vector<double> pivot{0.0}, same{0.75}, opposite{0.25};
  const auto fc = compare_features(pivot, same, opposite, {0});
  EXPECT_DOUBLE_EQ(fc.v_s[0], 0.75);
  EXPECT_DOUBLE_EQ(fc.v_o[0], 0.25);
  EXPECT_DOUBLE_EQ(fc.v[0], -0.5);
  EXPECT_TRUE(fc.kept.empty());
}

TEST(CompareFeatures, KeepsHelpfulFeature) {
  const std::vector<double> pivot{1.0}, same{0.75}, opposite{0.0};
  const auto fc = compare_features(pivot, same, opposite, {2});
  EXPECT_DOUBLE_EQ(fc.v_s[0], 0.25);
  EXPECT_DOUBLE_EQ(fc.v_o[0], 1.0);
  EXPECT_DOUBLE_EQ(fc.v[0], 0.75);
  EXPECT_EQ(fc.kept, (FeatureSet{2}));
}

TEST(CompareFeatures, PivotEqualToOppositeKeepsNothing) {
  const std::vector<double> pivot{1, 2, 3}, same{2, 0, 3.5}, opposite{1, 2, 3};
  EXPECT_TRUE(compare_features(pivot, same, opposite, {0, 1, 2}).kept.empty());
}

TEST(CompareFeatures, ZeroDifferenceIsPruned) {
  const std::vector<double> pivot{1, 1}, same{2, 1}, opposite{0, 3};
  EXPECT_EQ(compare_features(pivot, same, opposite, {4, 7}).kept, (FeatureSet{7}));
}

TEST(CompareFeatures, ToyPivotTable) {
  // First pivot of the toy data: neighbors are rows 1 (same) and 2 (opposite).
  const Dataset ds = testing::toy_dataset();
  const auto fc = compare_features(ds.row(0), ds.row(1), ds.row(2), all_features(4));
  EXPECT_EQ(fc.v, (std::vector<double>{-0.5, 0.125, 0.75, 0.125}));
  EXPECT_EQ(fc.kept, (FeatureSet{1, 2, 3}));
}

TEST(EvaluateCandidate, TwoSampleDataset) {
  const Dataset ds = Dataset::from_rows({{0, 1}, {3, 4}}, {0, 1});
  EXPECT_EQ(evaluate_candidate(ds, 0, 1, {0, 1}), 0u);
}

TEST(EvaluateCandidate, MatchesDirectLoop) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const Dataset ds = testing::random_dataset(rng, 10, 4);
    std::size_t s = rng() % 10;
    std::size_t o = rng() % 10;
    while (ds.label(o) == ds.label(s)) o = rng() % 10;
    FeatureSet c;
    for (std::size_t j = 0; j < 4; ++j) {
      if (rng() % 2) c.push_back(j);
    }
    if (c.empty()) c.push_back(rng() % 4);
    ASSERT_EQ(evaluate_candidate(ds, s, o, c), testing::ref_error(ds, s, o, c));
  }
}

TEST(EvaluateCandidate, StopAtCapsCount) {
  std::mt19937_64 rng(12);
  const Dataset ds = testing::random_dataset(rng, 40, 3);
  const auto full = evaluate_candidate(ds, 0, std::find(ds.labels().begin(), ds.labels().end(), 1 - ds.label(0)) -
                                              ds.labels().begin(),
                                       {0, 1, 2});
  if (full > 1) {
    const auto o = static_cast<std::size_t>(
        std::find(ds.labels().begin(), ds.labels().end(), 1 - ds.label(0)) - ds.labels().begin());
    EXPECT_EQ(evaluate_candidate(ds, 0, o, {0, 1, 2}, full - 1), full - 1);
  }
}

TEST(TrainLevel, ToyFirstLevel) {
  const Dataset ds = testing::toy_dataset();
  const auto m = all_features(4);
  const auto ix = NeighborIndex::build(ds, m, NeighborMode::exact, 42);
  const auto out = train_level(ds, m, ix);
  ASSERT_TRUE(out.best);
  EXPECT_EQ(out.best->error, 0u);
  EXPECT_EQ(out.best->pivot, 3u);
  // Prototypes are samples 2 and 3 in 1-based numbering.
  EXPECT_EQ(out.best->s, 2u);
  EXPECT_EQ(out.best->o, 1u);
  EXPECT_EQ(out.best->features, (FeatureSet{1, 3}));
}

TEST(TrainLevel, EqualErrorsKeepEarliestPivot) {
  const Dataset ds = testing::toy_dataset();
  const FeatureSet m{1, 3};
  const auto ix = NeighborIndex::build(ds, m, NeighborMode::exact, 42);
  const auto out = train_level(ds, m, ix);
  ASSERT_TRUE(out.best);
  EXPECT_EQ(out.best->pivot, 0u);  // pivots 0, 2 and 3 all reach zero error
  EXPECT_EQ(out.best->error, 0u);
}

TEST(TrainLevel, UniversalSkipYieldsNone) {
  const Dataset ds = Dataset::from_rows({{0, 0}, {0, 0}, {5, 5}, {5, 5}}, {0, 1, 0, 1});
  const auto ix = NeighborIndex::build(ds, all_features(2), NeighborMode::exact, 1);
  const auto out = train_level(ds, all_features(2), ix);
  EXPECT_FALSE(out.best);
  EXPECT_EQ(out.max_kept, 0u);
  EXPECT_THROW(nl_train(ds, exact_config()), TrainingError);
}

TEST(TrainLevel, MatchesSequentialReferenceForAnyWorkerCount) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 60; ++trial) {
    const Dataset ds = testing::random_dataset(rng, 8 + rng() % 60, 2 + rng() % 6);
    const auto m = all_features(ds.p());
    const auto ref = testing::ref_train_level(ds, m);
    const auto ix = NeighborIndex::build(ds, m, NeighborMode::exact, 1);
    for (std::size_t threads : {1u, 3u, 8u}) {
      const auto out = train_level(ds, m, ix, threads);
      ASSERT_EQ(out.best.has_value(), ref.found);
      if (!ref.found) continue;
      EXPECT_EQ(out.best->pivot, ref.pivot);
      EXPECT_EQ(out.best->s, ref.s);
      EXPECT_EQ(out.best->o, ref.o);
      EXPECT_EQ(out.best->error, ref.error);
      EXPECT_EQ(out.best->features, ref.features);
    }
  }
}

TEST(NlTrain, ToyConvergesInTwoLevels) {
  const Dataset ds = testing::toy_dataset();
  const auto r = nl_train(ds, exact_config());
  EXPECT_EQ(r.stats.iterations, 2u);
  ASSERT_EQ(r.stats.levels.size(), 2u);
  EXPECT_EQ(r.stats.levels[0].features_in, 4u);
  EXPECT_EQ(r.stats.levels[0].features_out, 2u);
  EXPECT_EQ(r.stats.levels[1].features_in, 2u);
  EXPECT_EQ(r.stats.levels[1].features_out, 2u);
  const auto& m = r.model;
  EXPECT_EQ(m.features, (FeatureSet{1, 3}));
  EXPECT_EQ(m.feature_names, (std::vector<std::string>{"F2", "F4"}));
  EXPECT_EQ(m.proto_s.sample_id, 1u);
  EXPECT_EQ(m.proto_o.sample_id, 2u);
  EXPECT_EQ(m.proto_s.label, 0);
  EXPECT_EQ(m.proto_o.label, 1);
  EXPECT_EQ(m.proto_s.values, (std::vector<double>{0.125, 0.625}));
  EXPECT_EQ(m.meta.train_error, 0u);
  EXPECT_EQ(m.meta.iterations, 2u);
}

TEST(NlTrain, TwoFeatureFloor) {
  // Classes separated on the second feature only.
  const Dataset ds = Dataset::from_rows({{1, 0}, {1, 0.1}, {1, 1}, {1, 0.9}}, {0, 0, 1, 1});
  try {
    const auto r = nl_train(ds, exact_config());
    EXPECT_EQ(r.model.features.size(), 2u);
  } catch (const TrainingError&) {
    SUCCEED();
  }
}

TEST(NlTrain, RejectsUntrainableData) {
  const Dataset ds = Dataset::from_rows({{0, 0}, {1, 1}, {2, 2}}, {0, 1, 1});
  EXPECT_THROW(nl_train(ds), ClassSizeError);
}

TEST(NlTrain, LevelCapBoundsIterations) {
  std::mt19937_64 rng(3);
  const Dataset ds = testing::random_dataset(rng, 40, 10);
  TrainConfig c = exact_config();
  c.level_cap = 1;
  EXPECT_EQ(nl_train(ds, c).stats.iterations, 1u);
}

TEST(NlTrain, PropertiesOnRandomData) {
  std::mt19937_64 rng(2024);
  std::size_t trained = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const Dataset ds = testing::random_dataset(rng, 6 + rng() % 40, 2 + rng() % 7);
    const auto ref = testing::ref_nl_train(ds);
    TrainResult r;
    try {
      r = nl_train(ds, exact_config(1 + rng() % 4));
    } catch (const TrainingError&) {
      EXPECT_FALSE(ref.ok);
      continue;
    }
    ++trained;
    ASSERT_TRUE(ref.ok);
    const auto& m = r.model;
    EXPECT_NO_THROW(m.validate());
    EXPECT_EQ(m.features, ref.winner.features);
    EXPECT_EQ(m.proto_s.sample_id, ref.winner.s);
    EXPECT_EQ(m.proto_o.sample_id, ref.winner.o);
    EXPECT_EQ(r.stats.iterations, ref.levels);
    EXPECT_LE(r.stats.iterations, std::min<std::size_t>(ds.p(), 64));
    // Feature sets only shrink from level to level.
    for (std::size_t l = 1; l < r.stats.levels.size(); ++l) {
      EXPECT_LT(r.stats.levels[l].features_in, r.stats.levels[l - 1].features_in);
    }
    // Training error is reproduced by prediction and by the direct loop.
    EXPECT_EQ(predict_batch(m, ds).errors, m.meta.train_error);
    EXPECT_EQ(testing::ref_error(ds, ref.winner.s, ref.winner.o, m.features), m.meta.train_error);
    // A level without candidates leaves the previous winner in place.
    if (!r.stats.levels.back().found) {
      EXPECT_EQ(m.features.size(), r.stats.levels.back().features_in);
    }
  }
  EXPECT_GT(trained, 100u);
}

TEST(NlTrain, ThreadCountInvariance) {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset ds = testing::random_dataset(rng, 30 + rng() % 150, 3 + rng() % 10);
    for (auto mode : {NeighborMode::exact, NeighborMode::lsh}) {
      TrainConfig c;
      c.mode = mode;
      c.seed = 5;
      c.threads = 1;
      std::string one;
      try {
        one = serialize_model(nl_train(ds, c).model);
      } catch (const TrainingError&) {
        continue;
      }
      c.threads = 8;
      EXPECT_EQ(serialize_model(nl_train(ds, c).model), one);
    }
  }
}

TEST(Fit, ScaledModelReproducesTrainingErrorOnRawRows) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset ds = testing::random_dataset(rng, 30, 5, 2, 250.0);
    try {
      const auto r = fit(ds, exact_config(), true);
      ASSERT_TRUE(r.model.scaled());
      EXPECT_EQ(predict_batch(r.model, ds).errors, r.model.meta.train_error);
    } catch (const TrainingError&) {
    }
  }
}

}  // namespace
}  // namespace natlearn
