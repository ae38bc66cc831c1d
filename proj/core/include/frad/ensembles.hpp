#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "frad/data.hpp"
#include "frad/tree.hpp"

namespace frad {

struct ForestParams {
  int n_trees = 100;
  bool bootstrap = true;
  TreeParams tree{kUnboundedDepth, tree_defaults::kForestMinSamplesLeaf, 4, 0.0, 0.0};
  std::uint64_t seed = 0;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct ForestModel {
  std::vector<Tree> trees;
  std::size_t n_features = 0;
  ForestParams params;

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

/// Each tree sees a bootstrap resample of the rows (unless disabled) and draws
/// from its own generator derived from (seed, tree index). Trees may be fitted
/// on up to `threads` workers with identical results.
ForestModel fit_random_forest(const Matrix& X, std::span<const int> y, const ForestParams& params, unsigned threads = 1);

enum class BoostVariant : std::uint8_t {
  FirstOrder,   // unit hessians, no lambda/gamma, no column subsampling
  SecondOrder,  // hessians p(1-p), L2 lambda, gain gate gamma, column subsampling
};

struct BoostParams {
  int n_rounds = 100;
  double learning_rate = 0.1;
  TreeParams tree{6, tree_defaults::kBoostMinSamplesLeaf, std::numeric_limits<int>::max(), 1.0, 0.0};
  double subsample_rows = 1.0;
  double subsample_cols = 1.0;
  BoostVariant variant = BoostVariant::SecondOrder;
  std::uint64_t seed = 0;
  /// Test hook: run the second-order path with every hessian replaced by 1.
  bool unit_hessians = false;

  friend bool operator==(const BoostParams&, const BoostParams&) = default;
};

/// Multiclass softmax boosting with one regression tree per class and round.
struct BoostModel {
  std::vector<std::array<Tree, kNumClasses>> stages;
  std::array<double, kNumClasses> base_score{};  // log class priors
  std::size_t n_features = 0;
  BoostParams params;
  /// Mean training cross-entropy before round 1 and after every round.
  std::vector<double> train_loss;

  friend bool operator==(const BoostModel&, const BoostModel&) = default;
};

BoostModel fit_boosting(const Matrix& X, std::span<const int> y, const BoostParams& params, unsigned threads = 1);

Matrix predict_proba(const ForestModel& model, const Matrix& X);
Matrix predict_proba(const BoostModel& model, const Matrix& X);

/// Row-wise argmax, lowest class index on ties.
std::vector<int> argmax_rows(const Matrix& proba);

/// Numerically stable in-place softmax.
void softmax_inplace(std::span<double> logits) noexcept;

/// Mean negative log-likelihood of the true labels; probabilities are floored
/// at 1e-300 before the log.
double cross_entropy(const Matrix& proba, std::span<const int> y);

}  // namespace frad
