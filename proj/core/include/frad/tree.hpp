#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "frad/matrix.hpp"
#include "frad/random.hpp"

namespace frad {

inline constexpr int kUnboundedDepth = std::numeric_limits<int>::max();

struct TreeParams {
  int max_depth = kUnboundedDepth;
  int min_samples_leaf = 1;
  /// Features sampled (without replacement) at every split; values at or above
  /// the feature count mean "all features".
  int n_feature_candidates = std::numeric_limits<int>::max();
  double lambda = 0.0;  // L2 penalty on leaf weights (regression only)
  double gamma = 0.0;   // minimum split gain (regression only)

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

/// Default leaf sizes: forest trees grow to purity, boosting trees are coarser.
namespace tree_defaults {
inline constexpr int kForestMinSamplesLeaf = 1;
inline constexpr int kBoostMinSamplesLeaf = 5;
}  // namespace tree_defaults

/// Internal nodes route `x[feature] < threshold` left, everything else right.
/// Leaves carry a class-probability vector (classification) or a length-1
/// weight (regression).
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> value;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Flat tree; nodes[0] is the root.
struct Tree {
  std::vector<TreeNode> nodes;
  std::size_t n_features = 0;

  int depth() const;
  std::size_t leaf_count() const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

/// Per-feature row orderings of a matrix, computed once and shared by every
/// tree fitted on it.
struct ColumnOrder {
  std::vector<std::vector<std::uint32_t>> by_feature;
  static ColumnOrder of(const Matrix& X);
};

/// Optional restrictions for a fit. Empty spans mean "all".
struct TreeFitOptions {
  std::span<const std::size_t> rows;      // may repeat rows (bootstrap multiplicity)
  std::span<const std::size_t> features;  // features eligible for splits
  const ColumnOrder* order = nullptr;     // presorted columns of X
};

/// 1 - sum_k p_k^2 over the label distribution. Throws EmptyInput.
double gini_impurity(std::span<const int> labels);

/// Greedy CART with gini gain. Thresholds are midpoints between consecutive
/// distinct values; among equal gains the lowest feature index, then the lowest
/// threshold wins. Impure nodes take their best split as long as it does not raise
/// weighted gini.
Tree fit_classification_tree(const Matrix& X, std::span<const int> y, int n_classes, const TreeParams& p, Rng& rng,
                             const TreeFitOptions& opts = {});

/// Second-order regression tree: leaf weight -G/(H+lambda), split gain
/// 0.5*[GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda)] - gamma, split only
/// when the gain is positive.
Tree fit_regression_tree(const Matrix& X, std::span<const double> g, std::span<const double> h, const TreeParams& p,
                         Rng& rng, const TreeFitOptions& opts = {});

/// Leaf value reached by x. Throws ShapeMismatch on arity mismatch.
std::span<const double> predict_tree(const Tree& t, std::span<const double> x);

}  // namespace frad
