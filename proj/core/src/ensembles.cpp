#include "frad/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "frad/parallel.hpp"

namespace frad {

namespace {

void check_training_set(const Matrix& X, std::span<const int> y) {
  if (X.rows() != y.size()) throw Error(ErrorCode::ShapeMismatch, "X rows and label count differ");
  if (X.rows() == 0) throw Error(ErrorCode::EmptyInput, "training set is empty");
  for (int l : y) {
    if (l < 0 || l >= static_cast<int>(kNumClasses)) throw Error(ErrorCode::InvalidLabel, "label outside {0,1,2}");
  }
}

void check_arity(std::size_t expected, const Matrix& X) {
  if (X.rows() > 0 && X.cols() != expected) {
    throw Error(ErrorCode::ShapeMismatch, "input has " + std::to_string(X.cols()) + " features, model expects " +
                                              std::to_string(expected));
  }
}

// Streams of derive_rng(seed, {purpose, ...}).
enum Stream : std::uint64_t { kForestTree = 10, kBoostRows = 20, kBoostCols = 21, kBoostTree = 22 };

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::size_t fraction_count(double fraction, std::size_t n) {
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, n);
}

}  // namespace

void softmax_inplace(std::span<double> logits) noexcept {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (auto& v : logits) {
    v = std::exp(v - m);
    sum += v;
  }
  for (auto& v : logits) v /= sum;
}

double cross_entropy(const Matrix& proba, std::span<const int> y) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    total -= std::log(std::max(proba(i, static_cast<std::size_t>(y[i])), 1e-300));
  }
  return y.empty() ? 0.0 : total / static_cast<double>(y.size());
}

std::vector<int> argmax_rows(const Matrix& proba) {
  std::vector<int> out(proba.rows());
  for (std::size_t i = 0; i < proba.rows(); ++i) {
    auto row = proba.row(i);
    out[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

ForestModel fit_random_forest(const Matrix& X, std::span<const int> y, const ForestParams& params, unsigned threads) {
  check_training_set(X, y);
  if (params.n_trees < 1) throw Error(ErrorCode::InvalidArgument, "n_trees must be >= 1");

  const ColumnOrder order = ColumnOrder::of(X);
  ForestModel model;
  model.params = params;
  model.n_features = X.cols();
  model.trees.resize(static_cast<std::size_t>(params.n_trees));

  parallel_for(model.trees.size(), threads, [&](std::size_t t) {
    Rng rng = derive_rng(params.seed, {kForestTree, t});
    std::vector<std::size_t> rows;
    if (params.bootstrap) {
      rows.resize(X.rows());
      std::uniform_int_distribution<std::size_t> pick(0, X.rows() - 1);
      for (auto& r : rows) r = pick(rng);
    }
    TreeFitOptions opts;
    opts.rows = rows;
    opts.order = &order;
    model.trees[t] = fit_classification_tree(X, y, static_cast<int>(kNumClasses), params.tree, rng, opts);
  });
  return model;
}

Matrix predict_proba(const ForestModel& model, const Matrix& X) {
  check_arity(model.n_features, X);
  Matrix out(X.rows(), kNumClasses, 0.0);
  const double inv = 1.0 / static_cast<double>(model.trees.size());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto dst = out.row(i);
    for (const auto& t : model.trees) {
      auto leaf = predict_tree(t, X.row(i));
      for (std::size_t k = 0; k < kNumClasses; ++k) dst[k] += leaf[k];
    }
    for (auto& v : dst) v *= inv;
  }
  return out;
}

BoostModel fit_boosting(const Matrix& X, std::span<const int> y, const BoostParams& params, unsigned threads) {
  check_training_set(X, y);
  if (params.n_rounds < 0) throw Error(ErrorCode::InvalidArgument, "n_rounds must be >= 0");
  if (!(params.learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning_rate must be positive");
  if (!(params.subsample_rows > 0.0 && params.subsample_rows <= 1.0) ||
      !(params.subsample_cols > 0.0 && params.subsample_cols <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "subsample fractions must lie in (0, 1]");
  }

  const std::size_t n = X.rows();
  const bool second_order = params.variant == BoostVariant::SecondOrder;
  TreeParams tp = params.tree;
  if (!second_order) {
    tp.lambda = 0.0;
    tp.gamma = 0.0;
  }

  BoostModel model;
  model.params = params;
  model.n_features = X.cols();

  std::array<double, kNumClasses> counts{};
  for (int l : y) counts[static_cast<std::size_t>(l)] += 1.0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    // An absent class gets a vanishing, finite prior.
    model.base_score[k] = std::log(std::max(counts[k], 1e-12) / static_cast<double>(n));
  }

  Matrix scores(n, kNumClasses);
  for (std::size_t i = 0; i < n; ++i) std::copy(model.base_score.begin(), model.base_score.end(), scores.row(i).begin());
  Matrix proba = scores;
  auto refresh_proba = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      auto src = scores.row(i);
      auto dst = proba.row(i);
      std::copy(src.begin(), src.end(), dst.begin());
      softmax_inplace(dst);
    }
  };
  refresh_proba();
  model.train_loss.push_back(cross_entropy(proba, y));

  const ColumnOrder order = ColumnOrder::of(X);
  std::array<std::vector<double>, kNumClasses> grad;
  std::array<std::vector<double>, kNumClasses> hess;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    grad[k].resize(n);
    hess[k].resize(n);
  }

  for (int round = 0; round < params.n_rounds; ++round) {
    const auto r = static_cast<std::uint64_t>(round);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        const double p = proba(i, k);
        grad[k][i] = p - (y[i] == static_cast<int>(k) ? 1.0 : 0.0);
        hess[k][i] = (second_order && !params.unit_hessians) ? p * (1.0 - p) : 1.0;
      }
    }

    std::vector<std::size_t> rows;
    if (params.subsample_rows < 1.0) {
      Rng rng = derive_rng(params.seed, {kBoostRows, r});
      rows = sample_without_replacement(n, fraction_count(params.subsample_rows, n), rng);
    }
    std::vector<std::size_t> cols;
    if (second_order && params.subsample_cols < 1.0) {
      Rng rng = derive_rng(params.seed, {kBoostCols, r});
      cols = sample_without_replacement(X.cols(), fraction_count(params.subsample_cols, X.cols()), rng);
    }

    std::array<Tree, kNumClasses> stage;
    parallel_for(kNumClasses, threads, [&](std::size_t k) {
      Rng rng = derive_rng(params.seed, {kBoostTree, r, k});
      TreeFitOptions opts;
      opts.rows = rows;
      opts.features = cols;
      opts.order = &order;
      stage[k] = fit_regression_tree(X, grad[k], hess[k], tp, rng, opts);
    });

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        scores(i, k) += params.learning_rate * predict_tree(stage[k], X.row(i))[0];
      }
    }
    refresh_proba();
    model.train_loss.push_back(cross_entropy(proba, y));
    model.stages.push_back(std::move(stage));
  }
  return model;
}

Matrix predict_proba(const BoostModel& model, const Matrix& X) {
  check_arity(model.n_features, X);
  Matrix out(X.rows(), kNumClasses);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto dst = out.row(i);
    std::array<double, kNumClasses> sum{};
    for (const auto& stage : model.stages) {
      for (std::size_t k = 0; k < kNumClasses; ++k) sum[k] += predict_tree(stage[k], X.row(i))[0];
    }
    for (std::size_t k = 0; k < kNumClasses; ++k) dst[k] = model.base_score[k] + model.params.learning_rate * sum[k];
    softmax_inplace(dst);
  }
  return out;
}

}  // namespace frad
