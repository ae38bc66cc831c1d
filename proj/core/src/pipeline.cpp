#include "frad/pipeline.hpp"

#include <cmath>

#include "frad/eval.hpp"

namespace frad {

std::string_view model_key(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::RandomForest: return "rf";
    case ModelKind::GradientBoosting: return "gb";
    case ModelKind::XGBoost: return "xgb";
    case ModelKind::Mlp: return "mlp";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view key) noexcept {
  for (auto k : kAllModelKinds) {
    if (model_key(k) == key) return k;
  }
  return std::nullopt;
}

SearchSpace search_space(ModelKind kind, std::size_t n_features) {
  switch (kind) {
    case ModelKind::RandomForest: return forest_search_space(n_features);
    case ModelKind::GradientBoosting: return gb_search_space();
    case ModelKind::XGBoost: return xgb_search_space();
    case ModelKind::Mlp: return mlp_search_space();
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

ParamSet default_hyperparameters(ModelKind kind) {
  switch (kind) {
    case ModelKind::RandomForest:
      return {{{"n_trees", 100}, {"n_feature_candidates", 4}}};
    case ModelKind::GradientBoosting:
      return {{{"n_rounds", 100}, {"learning_rate", 0.1}, {"max_depth", 3}, {"subsample_rows", 1.0}}};
    case ModelKind::XGBoost:
      return {{{"n_rounds", 100},
               {"learning_rate", 0.1},
               {"max_depth", 6},
               {"lambda", 1.0},
               {"subsample_rows", 1.0},
               {"subsample_cols", 1.0}}};
    case ModelKind::Mlp:
      return {{{"n_hidden", kPaperHiddenUnits}, {"learning_rate", kPaperInitialLearningRate}, {"batch_size", 64}}};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

std::uint64_t model_seed(std::uint64_t run_seed, ModelKind kind) {
  Rng rng = derive_rng(run_seed, {60, static_cast<std::uint64_t>(kind)});
  return rng();
}

namespace {

int as_int(const ParamSet& p, std::string_view name, int fallback) {
  return static_cast<int>(std::lround(p.get_or(name, fallback)));
}

}  // namespace

Model fit_model(ModelKind kind, const ParamSet& hyper, const Matrix& X, std::span<const int> y,
                const TrainSettings& settings) {
  const auto seed = model_seed(settings.seed, kind);
  switch (kind) {
    case ModelKind::RandomForest: {
      ForestParams p;
      p.seed = seed;
      p.n_trees = as_int(hyper, "n_trees", p.n_trees);
      p.tree.max_depth = as_int(hyper, "max_depth", kUnboundedDepth);
      p.tree.n_feature_candidates = as_int(hyper, "n_feature_candidates", p.tree.n_feature_candidates);
      return fit_random_forest(X, y, p, settings.threads);
    }
    case ModelKind::GradientBoosting:
    case ModelKind::XGBoost: {
      BoostParams p;
      p.seed = seed;
      p.variant = kind == ModelKind::XGBoost ? BoostVariant::SecondOrder : BoostVariant::FirstOrder;
      p.n_rounds = as_int(hyper, "n_rounds", p.n_rounds);
      p.learning_rate = hyper.get_or("learning_rate", p.learning_rate);
      p.tree.max_depth = as_int(hyper, "max_depth", p.tree.max_depth);
      p.subsample_rows = hyper.get_or("subsample_rows", 1.0);
      if (kind == ModelKind::XGBoost) {
        p.tree.lambda = hyper.get_or("lambda", p.tree.lambda);
        p.subsample_cols = hyper.get_or("subsample_cols", 1.0);
      } else {
        p.tree.lambda = 0.0;
        p.tree.gamma = 0.0;
        p.subsample_cols = 1.0;
      }
      return fit_boosting(X, y, p, settings.threads);
    }
    case ModelKind::Mlp: {
      MlpTrainConfig c;
      c.seed = seed;
      c.epochs = settings.mlp_epochs;
      c.n_hidden = as_int(hyper, "n_hidden", c.n_hidden);
      c.initial_learning_rate = hyper.get_or("learning_rate", c.initial_learning_rate);
      c.batch_size = as_int(hyper, "batch_size", c.batch_size);
      return train_mlp(X, y, c);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "accuracy needs equal, nonempty label vectors");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

HpoResult tune_model(ModelKind kind, const Matrix& X, std::span<const int> y, const TrainSettings& settings) {
  Dataset all;
  all.features = X;
  all.labels.reserve(y.size());
  for (int l : y) all.labels.push_back(LabelId{l});
  for (std::size_t j = 0; j < X.cols(); ++j) all.feature_names.push_back("f" + std::to_string(j));
  const auto inner_seed = model_seed(settings.seed, kind) ^ 0x9e3779b97f4a7c15ULL;
  const SplitResult split = stratified_split(all, settings.hpo_train_fraction, inner_seed);
  const auto y_fit = label_codes(split.train);
  const auto y_val = label_codes(split.test);

  // Trials in the initial design may run concurrently, so each fit is single-threaded.
  TrainSettings inner = settings;
  inner.threads = 1;
  const Objective objective = [&](const ParamSet& hyper) {
    const Model m = fit_model(kind, hyper, split.train.features, y_fit, inner);
    return accuracy(y_val, argmax_rows(predict_proba(m, split.test.features)));
  };

  BayesOptions opts;
  opts.budget = settings.hpo_budget;
  opts.n_init = std::min(settings.hpo_init, settings.hpo_budget);
  opts.seed = inner_seed;
  opts.threads = settings.threads;
  return bayes_optimize(objective, search_space(kind, X.cols()), opts);
}

}  // namespace frad
