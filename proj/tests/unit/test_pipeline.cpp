#include <doctest.h>

#include <cmath>
#include <limits>

#include "frad/pipeline.hpp"
#include "test_support.hpp"

using namespace frad;

TEST_CASE("model keys round-trip") {
  for (auto k : kAllModelKinds) CHECK(parse_model_kind(model_key(k)) == k);
  CHECK_FALSE(parse_model_kind("svm").has_value());
  CHECK(model_key(ModelKind::XGBoost) == "xgb");
}

TEST_CASE("default hyperparameters lie in their search spaces") {
  for (auto k : kAllModelKinds) {
    const auto space = search_space(k, kNumFeatures);
    const auto defaults = default_hyperparameters(k);
    for (const auto& d : space.dims) {
      // An absent entry means "unbounded" (forest depth), which the search never proposes.
      const double v = defaults.get_or(d.name, std::numeric_limits<double>::quiet_NaN());
      if (std::isnan(v)) continue;
      CHECK(v >= d.low);
      CHECK(v <= d.high);
    }
  }
  CHECK(std::isnan(default_hyperparameters(ModelKind::RandomForest).get_or("max_depth", std::nan(""))));
  CHECK(default_hyperparameters(ModelKind::Mlp).at("n_hidden") == 233);
}

TEST_CASE("model seeds differ per model and follow the run seed") {
  CHECK(model_seed(42, ModelKind::RandomForest) != model_seed(42, ModelKind::Mlp));
  CHECK(model_seed(42, ModelKind::RandomForest) == model_seed(42, ModelKind::RandomForest));
  CHECK(model_seed(42, ModelKind::RandomForest) != model_seed(43, ModelKind::RandomForest));
}

TEST_CASE("fitting every model kind yields calibrated probabilities") {
  const auto data = testing_support::synthetic(300, 0.25, 5);
  TrainSettings s;
  s.mlp_epochs = 5;
  for (auto k : kAllModelKinds) {
    auto hyper = default_hyperparameters(k);
    const Model m = fit_model(k, hyper, data.X, data.y, s);
    const Matrix p = predict_proba(m, data.X);
    CHECK(p.rows() == data.X.rows());
    const auto pred = argmax_rows(p);
    CHECK(accuracy(data.y, pred) > 0.6);
  }
  CHECK(model_type(fit_model(ModelKind::GradientBoosting, default_hyperparameters(ModelKind::GradientBoosting), data.X,
                             data.y, s)) == "gradient_boosting");
}

TEST_CASE("tuning is reproducible across thread counts") {
  const auto data = testing_support::synthetic(240, 0.25, 6);
  TrainSettings s;
  s.hpo_budget = 4;
  s.hpo_init = 3;
  s.threads = 1;
  const auto a = tune_model(ModelKind::RandomForest, data.X, data.y, s);
  s.threads = 3;
  const auto b = tune_model(ModelKind::RandomForest, data.X, data.y, s);
  REQUIRE(a.trials.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.trials[i].params == b.trials[i].params);
    CHECK(a.trials[i].objective == b.trials[i].objective);
  }
}
