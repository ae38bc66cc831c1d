#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "frad/model.hpp"
#include "frad/pipeline.hpp"
#include "test_support.hpp"

using namespace frad;

namespace {

ModelFile wrap(Model m, const testing_support::Standardized& data) {
  ModelFile f;
  f.model = std::move(m);
  f.standardizer = fit_standardizer(data.raw.features, data.raw.feature_names);
  f.feature_names = data.raw.feature_names;
  f.seed = 42;
  f.config_hash = "0123456789abcdef";
  return f;
}

std::vector<Model> small_models(const testing_support::Standardized& data) {
  ForestParams fp;
  fp.n_trees = 3;
  BoostParams gb;
  gb.n_rounds = 3;
  gb.variant = BoostVariant::FirstOrder;
  BoostParams xgb;
  xgb.n_rounds = 3;
  xgb.subsample_cols = 0.5;
  MlpTrainConfig mc;
  mc.n_hidden = 7;
  mc.epochs = 2;
  return {fit_random_forest(data.X, data.y, fp), fit_boosting(data.X, data.y, gb), fit_boosting(data.X, data.y, xgb),
          train_mlp(data.X, data.y, mc)};
}

}  // namespace

TEST_CASE("model files round-trip every model type exactly") {
  const auto data = testing_support::synthetic(150, 0.25, 1);
  const auto dir = testing_support::scratch_dir("model_roundtrip");
  const std::vector<std::string> types{"random_forest", "gradient_boosting", "xgboost", "mlp"};
  std::size_t i = 0;
  for (auto& m : small_models(data)) {
    const auto f = wrap(m, data);
    CHECK(model_type(f.model) == types[i]);
    const auto path = dir / (types[i] + ".json");
    save_model(f, path);
    const auto back = load_model(path, data.raw.feature_names);
    CHECK(back.model == f.model);
    CHECK(back.seed == 42);
    CHECK(back.config_hash == f.config_hash);
    CHECK(back.standardizer.means == f.standardizer.means);
    CHECK(predict_raw(back, data.raw.features) == predict_raw(f, data.raw.features));
    CHECK(model_file_json(back) == read_file(path));

    const auto doc = nlohmann::json::parse(read_file(path));
    CHECK(doc["format_version"] == 1);
    CHECK(doc["model_type"] == types[i]);
    CHECK(doc["seed"] == 42);
    CHECK(doc["feature_names"].size() == 13);
    ++i;
  }
}

TEST_CASE("MLP files echo the training configuration") {
  const auto data = testing_support::synthetic(60, 0.25, 2);
  MlpTrainConfig cfg;
  cfg.epochs = 1;
  const auto f = wrap(train_mlp(data.X, data.y, cfg), data);
  const auto params = nlohmann::json::parse(model_params_json(f.model));
  CHECK(params["n_hidden"] == 233);
  CHECK(params["initial_learning_rate"].get<double>() == 0.0021547501740925594);
}

TEST_CASE("loading rejects mismatched features and malformed documents") {
  const auto data = testing_support::synthetic(60, 0.25, 3);
  const auto dir = testing_support::scratch_dir("model_errors");
  ForestParams fp;
  fp.n_trees = 1;
  save_model(wrap(fit_random_forest(data.X, data.y, fp), data), dir / "rf.json");

  auto names = data.raw.feature_names;
  std::swap(names[0], names[1]);
  const auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of([&] { load_model(dir / "rf.json", names); }) == ErrorCode::SchemaMismatch);
  CHECK(code_of([&] { load_model(dir / "none.json"); }) == ErrorCode::MissingFile);
  std::ofstream(dir / "junk.json") << "{not json";
  CHECK(code_of([&] { load_model(dir / "junk.json"); }) == ErrorCode::SchemaMismatch);
  std::ofstream(dir / "wrong.json") << R"({"format_version": 99, "model_type": "mlp"})";
  CHECK(code_of([&] { load_model(dir / "wrong.json"); }) == ErrorCode::SchemaMismatch);

  const auto f = load_model(dir / "rf.json");
  CHECK_THROWS_AS(predict_raw(f, Matrix(2, 5)), Error);
}

TEST_CASE("unbounded depth is stored as null") {
  const auto data = testing_support::synthetic(60, 0.25, 4);
  ForestParams fp;
  fp.n_trees = 1;
  const Model m = fit_random_forest(data.X, data.y, fp);
  const auto params = nlohmann::json::parse(model_params_json(m));
  CHECK(params["max_depth"].is_null());
}
