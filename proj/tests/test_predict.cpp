#include <gtest/gtest.h>

#include <random>

#include "natlearn/explain.hpp"
#include "natlearn/predict.hpp"
#include "natlearn/train.hpp"
#include "support/test_support.hpp"

namespace natlearn {
namespace {

NLModel iris_rule() {
  NLModel m;
  m.features = {2};
  m.feature_names = {"petal_length"};
  m.proto_s = {5, 0, {1.4}};
  m.proto_o = {6, 1, {3.3}};
  m.label_values = {"setosa", "versicolor"};
  m.meta.p = 4;
  return m;
}

NLModel two_feature_model() {
  NLModel m;
  m.features = {0, 2};
  m.feature_names = {"a", "c"};
  m.proto_s = {10, 1, {0.0, 0.0}};
  m.proto_o = {20, 0, {2.0, 0.0}};
  m.label_values = {"neg", "pos"};
  m.meta.p = 3;
  m.meta.n = 50;
  return m;
}

TEST(Distance, Examples) {
  const std::vector<double> a{0, 0}, b{3, 4};
  EXPECT_DOUBLE_EQ(distance(a, a, {0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(distance(a, b, {0, 1}), 5.0);
  const std::vector<double> x{1.5}, y{1.4};
  EXPECT_NEAR(distance(x, y, {0}), 0.1, 1e-12);
  EXPECT_THROW(distance(x, y, {0, 1}), DimensionError);
}

TEST(PredictOne, IrisRule) {
  const NLModel m = iris_rule();
  const auto pred = predict_one(m, std::vector<double>{5.0, 3.4, 1.5, 0.2});
  EXPECT_EQ(pred.label, 0);
  EXPECT_NEAR(pred.d_s, 0.1, 1e-12);
  EXPECT_NEAR(pred.d_o, 1.8, 1e-12);
  EXPECT_EQ(predict_one(m, std::vector<double>{4.1}).label, 1);
}

TEST(PredictOne, TieGoesToSPrototype) {
  const NLModel m = two_feature_model();
  const auto pred = predict_one(m, std::vector<double>{1.0, 99.0, 5.0});
  EXPECT_EQ(pred.d_s, pred.d_o);
  EXPECT_EQ(pred.label, m.proto_s.label);
}

TEST(PredictOne, EqualToOPrototype) {
  const NLModel m = two_feature_model();
  const auto pred = predict_one(m, m.proto_o.values);
  EXPECT_EQ(pred.d_o, 0.0);
  EXPECT_EQ(pred.label, m.proto_o.label);
}

TEST(PredictOne, WrongWidth) {
  EXPECT_THROW(predict_one(two_feature_model(), std::vector<double>{1, 2, 3, 4}), DimensionError);
}

TEST(PredictOne, PrototypeSelfConsistencyAndScaleEquivariance) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 500; ++trial) {
    NLModel m;
    const std::size_t k = 2 + rng() % 5;
    m.meta.p = k;
    m.features = all_features(k);
    for (std::size_t j = 0; j < k; ++j) {
      m.feature_names.push_back("f" + std::to_string(j));
      m.proto_s.values.push_back(u(rng));
      m.proto_o.values.push_back(u(rng));
    }
    m.proto_s.label = static_cast<int>(rng() % 2);
    m.proto_o.label = 1 - m.proto_s.label;
    EXPECT_EQ(predict_one(m, m.proto_s.values).label, m.proto_s.label);
    if (m.proto_s.values != m.proto_o.values) EXPECT_EQ(predict_one(m, m.proto_o.values).label, m.proto_o.label);

    std::vector<double> x(k);
    for (auto& v : x) v = u(rng);
    const double c = std::ldexp(1.0, static_cast<int>(rng() % 9) - 4);  // powers of two scale exactly
    NLModel scaled = m;
    for (auto& v : scaled.proto_s.values) v *= c;
    for (auto& v : scaled.proto_o.values) v *= c;
    auto xs = x;
    for (auto& v : xs) v *= c;
    EXPECT_EQ(predict_one(m, x).label, predict_one(scaled, xs).label);
  }
}

TEST(PredictBatch, TrainingSetReproducesTrainError) {
  const Dataset ds = testing::toy_dataset();
  TrainConfig c;
  c.mode = NeighborMode::exact;
  const auto r = nl_train(ds, c);
  const auto batch = predict_batch(r.model, ds);
  EXPECT_EQ(batch.errors, r.model.meta.train_error);
  EXPECT_EQ(batch.predicted.size(), 4u);
}

TEST(PredictBatch, MissingFeaturesNamed) {
  FeatureTable t;
  t.n = 1;
  t.p = 2;
  t.values = {1, 2};
  t.names = {"x", "y"};
  try {
    predict_batch(two_feature_model(), t);
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("a, c"), std::string::npos);
  }
}

TEST(PredictBatch, PrototypesThemselves) {
  const NLModel m = two_feature_model();
  FeatureTable t;
  t.n = 2;
  t.p = 2;
  t.names = {"c", "a"};
  t.values = {m.proto_s.values[1], m.proto_s.values[0], m.proto_o.values[1], m.proto_o.values[0]};
  const auto preds = predict_batch(m, t);
  EXPECT_EQ(preds[0].label, m.proto_s.label);
  EXPECT_EQ(preds[1].label, m.proto_o.label);
}

TEST(Explain, GlobalCard) {
  const std::string text = explain(two_feature_model());
  EXPECT_NE(text.find("#10"), std::string::npos);
  EXPECT_NE(text.find("#20"), std::string::npos);
  EXPECT_NE(text.find("pos (1)"), std::string::npos);
  EXPECT_NE(text.find("neg (0)"), std::string::npos);
  // Header plus one line per feature after the blank separator.
  const auto table = text.substr(text.find("\n\n") + 2);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
  EXPECT_NE(table.find("\na "), std::string::npos);
  EXPECT_NE(table.find("\nc "), std::string::npos);
}

TEST(Explain, FullPrecisionAndDisplayColumns) {
  NLModel m = two_feature_model();
  m.proto_s.values[0] = 0.123456789;
  const std::string text = explain(m);
  EXPECT_NE(text.find("0.1235"), std::string::npos);
  EXPECT_NE(text.find("0.123456789"), std::string::npos);
}

TEST(Explain, SampleAtPrototype) {
  const NLModel m = two_feature_model();
  const std::vector<double> x = m.proto_s.values;
  const std::string text = explain(m, std::span<const double>(x));
  EXPECT_NE(text.find("distance 0 to prototype of class pos (1)"), std::string::npos);
  EXPECT_NE(text.find("(d_s) = 0"), std::string::npos);
  EXPECT_NE(text.find("contribution"), std::string::npos);
}

}  // namespace
}  // namespace natlearn
