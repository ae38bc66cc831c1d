#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "frad/hpo.hpp"
#include "frad/model.hpp"

namespace frad {

enum class ModelKind : std::uint8_t { RandomForest, GradientBoosting, XGBoost, Mlp };

inline constexpr std::array<ModelKind, 4> kAllModelKinds{ModelKind::RandomForest, ModelKind::GradientBoosting,
                                                         ModelKind::XGBoost, ModelKind::Mlp};

/// Short names used on the command line and in file names: rf, gb, xgb, mlp.
std::string_view model_key(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view key) noexcept;

struct TrainSettings {
  bool hpo = true;
  int hpo_budget = 25;
  int hpo_init = 8;
  /// Fraction of the training partition used for fitting inside the search;
  /// the remainder scores trials.
  double hpo_train_fraction = 0.75;
  int mlp_epochs = 300;
  std::uint64_t seed = 42;
  unsigned threads = 1;
};

SearchSpace search_space(ModelKind kind, std::size_t n_features);
/// Hyperparameters used when the search is disabled.
ParamSet default_hyperparameters(ModelKind kind);

/// Seed of one model's fit, derived from the run seed.
std::uint64_t model_seed(std::uint64_t run_seed, ModelKind kind);

/// Fits `kind` with the named hyperparameters on already standardized rows.
Model fit_model(ModelKind kind, const ParamSet& hyper, const Matrix& X, std::span<const int> y,
                const TrainSettings& settings);

/// Bayesian search scored by validation accuracy on a seeded stratified split
/// of the given (training) rows.
HpoResult tune_model(ModelKind kind, const Matrix& X, std::span<const int> y, const TrainSettings& settings);

double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

}  // namespace frad
