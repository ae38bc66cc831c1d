#include "frad/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace frad {

int Tree::depth() const {
  if (nodes.empty()) return 0;
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [idx, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const auto& n = nodes[static_cast<std::size_t>(idx)];
    if (!n.is_leaf()) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return best;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

ColumnOrder ColumnOrder::of(const Matrix& X) {
  ColumnOrder out;
  out.by_feature.resize(X.cols());
  for (std::size_t f = 0; f < X.cols(); ++f) {
    auto& ord = out.by_feature[f];
    ord.resize(X.rows());
    std::iota(ord.begin(), ord.end(), 0u);
    std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) { return X(a, f) < X(b, f); });
  }
  return out;
}

double gini_impurity(std::span<const int> labels) {
  if (labels.empty()) throw Error(ErrorCode::EmptyInput, "gini impurity of an empty label set");
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<double> counts(static_cast<std::size_t>(std::max(k, 1)), 0.0);
  for (int l : labels) counts[static_cast<std::size_t>(l)] += 1.0;
  const double n = static_cast<double>(labels.size());
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += (c / n) * (c / n);
  return 1.0 - sum_sq;
}

namespace {

// Gains closer than this are treated as ties so the documented tie-break
// (lowest feature, then lowest threshold) decides.
constexpr double kTieTolerance = 1e-12;
// An impure node takes its best split unless that split would raise weighted
// gini; zero-gain splits are allowed so patterns like XOR can be reached.
constexpr double kMinGiniGain = -1e-12;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
  std::size_t n_left = 0;
};

double midpoint(double lo, double hi) {
  const double m = lo + (hi - lo) / 2.0;
  // Keep lo on the left of the strict-less test even when the midpoint rounds down.
  return m > lo ? m : hi;
}

/// Rows of the current subtree, held once per eligible feature in sorted order.
/// Children occupy contiguous sub-ranges of every list after a partition.
class NodeRows {
 public:
  NodeRows(const Matrix& X, const TreeFitOptions& opts, std::vector<int> features)
      : X_(X), features_(std::move(features)), goes_left_(X.rows(), 0) {
    ColumnOrder local;
    const ColumnOrder* order = opts.order;
    if (order == nullptr) {
      local = ColumnOrder::of(X);
      order = &local;
    }
    sorted_.resize(features_.size());
    if (opts.rows.empty()) {
      for (std::size_t i = 0; i < features_.size(); ++i) {
        sorted_[i] = order->by_feature[static_cast<std::size_t>(features_[i])];
      }
    } else {
      std::vector<std::uint32_t> multiplicity(X.rows(), 0);
      for (auto r : opts.rows) {
        if (r >= X.rows()) throw Error(ErrorCode::ShapeMismatch, "row index out of range");
        ++multiplicity[r];
      }
      for (std::size_t i = 0; i < features_.size(); ++i) {
        auto& dst = sorted_[i];
        dst.reserve(opts.rows.size());
        for (auto r : order->by_feature[static_cast<std::size_t>(features_[i])]) {
          dst.insert(dst.end(), multiplicity[r], r);
        }
      }
    }
    scratch_.resize(sorted_.empty() ? 0 : sorted_[0].size());
  }

  std::size_t size() const { return sorted_.empty() ? 0 : sorted_[0].size(); }
  const std::vector<int>& features() const { return features_; }
  /// Rows of [begin, end) ordered by eligible feature `slot`.
  std::span<const std::uint32_t> rows(std::size_t slot, std::size_t begin, std::size_t end) const {
    return {sorted_[slot].data() + begin, end - begin};
  }
  std::size_t slot_of(int feature) const {
    return static_cast<std::size_t>(std::find(features_.begin(), features_.end(), feature) - features_.begin());
  }

  /// Stable partition of every list's [begin, end) by the split predicate.
  void partition(std::size_t begin, std::size_t end, int feature, double threshold) {
    for (auto r : rows(0, begin, end)) goes_left_[r] = X_(r, static_cast<std::size_t>(feature)) < threshold ? 1 : 0;
    for (auto& list : sorted_) {
      std::size_t l = begin;
      std::size_t s = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = list[i];
        if (goes_left_[r]) {
          list[l++] = r;
        } else {
          scratch_[s++] = r;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(s), list.begin() + static_cast<std::ptrdiff_t>(l));
    }
  }

 private:
  const Matrix& X_;
  std::vector<int> features_;
  std::vector<std::vector<std::uint32_t>> sorted_;
  std::vector<std::uint32_t> scratch_;
  std::vector<char> goes_left_;
};

std::vector<int> eligible_features(const Matrix& X, const TreeFitOptions& opts) {
  std::vector<int> out;
  if (opts.features.empty()) {
    out.resize(X.cols());
    std::iota(out.begin(), out.end(), 0);
  } else {
    for (auto f : opts.features) {
      if (f >= X.cols()) throw Error(ErrorCode::ShapeMismatch, "feature index out of range");
      out.push_back(static_cast<int>(f));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no features available for splitting");
  return out;
}

/// Slots (indices into NodeRows::features()) examined at one split, ascending.
std::vector<std::size_t> sample_slots(std::size_t n_eligible, int n_candidates, Rng& rng) {
  std::vector<std::size_t> slots(n_eligible);
  std::iota(slots.begin(), slots.end(), 0);
  const auto k = static_cast<std::size_t>(std::max(1, n_candidates));
  if (k >= n_eligible) return slots;
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n_eligible - 1);
    std::swap(slots[i], slots[pick(rng)]);
  }
  slots.resize(k);
  std::sort(slots.begin(), slots.end());
  return slots;
}

void check_params(const TreeParams& p) {
  if (p.max_depth < 0) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 0");
  if (p.min_samples_leaf < 1) throw Error(ErrorCode::InvalidArgument, "min_samples_leaf must be >= 1");
  if (p.n_feature_candidates < 1) throw Error(ErrorCode::InvalidArgument, "n_feature_candidates must be >= 1");
  if (!(p.lambda >= 0.0) || !(p.gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda and gamma must be >= 0");
}

class ClassificationBuilder {
 public:
  ClassificationBuilder(const Matrix& X, std::span<const int> y, int n_classes, const TreeParams& p, Rng& rng,
                        const TreeFitOptions& opts)
      : X_(X), y_(y), k_(static_cast<std::size_t>(n_classes)), p_(p), rng_(rng), rows_(X, opts, eligible_features(X, opts)) {}

  Tree build() {
    tree_.n_features = X_.cols();
    grow(0, rows_.size(), 0);
    return std::move(tree_);
  }

 private:
  int grow(std::size_t begin, std::size_t end, int depth) {
    const int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::vector<double> counts(k_, 0.0);
    for (auto r : rows_.rows(0, begin, end)) counts[static_cast<std::size_t>(y_[r])] += 1.0;
    const std::size_t n = end - begin;
    const auto distinct = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; });

    const bool can_split = depth < p_.max_depth && distinct > 1 &&
                           n >= 2 * static_cast<std::size_t>(p_.min_samples_leaf);
    Split best;
    if (can_split) best = find_split(begin, end, counts);
    if (!can_split || best.feature < 0 || !(best.gain >= kMinGiniGain)) {
      for (auto& c : counts) c /= static_cast<double>(n);
      tree_.nodes[static_cast<std::size_t>(index)].value = std::move(counts);
      return index;
    }

    rows_.partition(begin, end, best.feature, best.threshold);
    const int left = grow(begin, begin + best.n_left, depth + 1);
    const int right = grow(begin + best.n_left, end, depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(index)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    return index;
  }

  Split find_split(std::size_t begin, std::size_t end, const std::vector<double>& counts) {
    const std::size_t n = end - begin;
    const auto min_leaf = static_cast<std::size_t>(p_.min_samples_leaf);
    double parent_sq = 0.0;
    for (double c : counts) parent_sq += c * c;
    const double nd = static_cast<double>(n);
    const double parent_term = parent_sq / nd;

    Split best;
    std::vector<double> left(k_);
    for (auto slot : sample_slots(rows_.features().size(), p_.n_feature_candidates, rng_)) {
      const int f = rows_.features()[slot];
      const auto col = static_cast<std::size_t>(f);
      auto rows = rows_.rows(slot, begin, end);
      std::fill(left.begin(), left.end(), 0.0);
      double left_sq = 0.0;
      double right_sq = parent_sq;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto cls = static_cast<std::size_t>(y_[rows[i]]);
        // Incremental sums of squared class counts on each side.
        const double cl = left[cls];
        const double cr = counts[cls] - cl;
        left_sq += 2.0 * cl + 1.0;
        right_sq -= 2.0 * cr - 1.0;
        left[cls] = cl + 1.0;

        const std::size_t n_left = i + 1;
        const double v = X_(rows[i], col);
        const double next = X_(rows[i + 1], col);
        if (!(v < next) || n_left < min_leaf || n - n_left < min_leaf) continue;
        const double score = left_sq / static_cast<double>(n_left) + right_sq / static_cast<double>(n - n_left);
        const double gain = (score - parent_term) / nd;
        if (gain > best.gain + kTieTolerance) best = {f, midpoint(v, next), gain, n_left};
      }
    }
    return best;
  }

  const Matrix& X_;
  std::span<const int> y_;
  std::size_t k_;
  const TreeParams& p_;
  Rng& rng_;
  NodeRows rows_;
  Tree tree_;
};

class RegressionBuilder {
 public:
  RegressionBuilder(const Matrix& X, std::span<const double> g, std::span<const double> h, const TreeParams& p, Rng& rng,
                    const TreeFitOptions& opts)
      : X_(X), g_(g), h_(h), p_(p), rng_(rng), rows_(X, opts, eligible_features(X, opts)) {}

  Tree build() {
    tree_.n_features = X_.cols();
    grow(0, rows_.size(), 0);
    return std::move(tree_);
  }

 private:
  double weight(double G, double H) const {
    const double denom = H + p_.lambda;
    return denom > 0.0 ? -G / denom : 0.0;
  }

  double score(double G, double H) const {
    const double denom = H + p_.lambda;
    return denom > 0.0 ? G * G / denom : 0.0;
  }

  int grow(std::size_t begin, std::size_t end, int depth) {
    const int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    double G = 0.0;
    double H = 0.0;
    for (auto r : rows_.rows(0, begin, end)) {
      G += g_[r];
      H += h_[r];
    }
    const std::size_t n = end - begin;
    const bool can_split = depth < p_.max_depth && n >= 2 * static_cast<std::size_t>(p_.min_samples_leaf);
    Split best;
    if (can_split) best = find_split(begin, end, G, H);
    if (!can_split || best.feature < 0 || !(best.gain > 0.0)) {
      tree_.nodes[static_cast<std::size_t>(index)].value = {weight(G, H)};
      return index;
    }

    rows_.partition(begin, end, best.feature, best.threshold);
    const int left = grow(begin, begin + best.n_left, depth + 1);
    const int right = grow(begin + best.n_left, end, depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(index)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    return index;
  }

  Split find_split(std::size_t begin, std::size_t end, double G, double H) {
    const std::size_t n = end - begin;
    const auto min_leaf = static_cast<std::size_t>(p_.min_samples_leaf);
    const double parent = score(G, H);
    Split best;
    for (auto slot : sample_slots(rows_.features().size(), p_.n_feature_candidates, rng_)) {
      const int f = rows_.features()[slot];
      const auto col = static_cast<std::size_t>(f);
      auto rows = rows_.rows(slot, begin, end);
      double GL = 0.0;
      double HL = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        GL += g_[rows[i]];
        HL += h_[rows[i]];
        const std::size_t n_left = i + 1;
        const double v = X_(rows[i], col);
        const double next = X_(rows[i + 1], col);
        if (!(v < next) || n_left < min_leaf || n - n_left < min_leaf) continue;
        const double GR = G - GL;
        const double HR = H - HL;
        if (!(HL + p_.lambda > 0.0) || !(HR + p_.lambda > 0.0)) continue;
        const double gain = 0.5 * (score(GL, HL) + score(GR, HR) - parent) - p_.gamma;
        if (gain > best.gain + kTieTolerance) best = {f, midpoint(v, next), gain, n_left};
      }
    }
    return best;
  }

  const Matrix& X_;
  std::span<const double> g_;
  std::span<const double> h_;
  const TreeParams& p_;
  Rng& rng_;
  NodeRows rows_;
  Tree tree_;
};

}  // namespace

Tree fit_classification_tree(const Matrix& X, std::span<const int> y, int n_classes, const TreeParams& p, Rng& rng,
                             const TreeFitOptions& opts) {
  check_params(p);
  if (X.rows() != y.size()) throw Error(ErrorCode::ShapeMismatch, "X rows and label count differ");
  if (X.rows() == 0) throw Error(ErrorCode::EmptyInput, "cannot fit a tree on zero rows");
  if (n_classes < 1) throw Error(ErrorCode::InvalidArgument, "n_classes must be >= 1");
  for (int l : y) {
    if (l < 0 || l >= n_classes) throw Error(ErrorCode::InvalidLabel, "label outside [0, n_classes)");
  }
  return ClassificationBuilder(X, y, n_classes, p, rng, opts).build();
}

Tree fit_regression_tree(const Matrix& X, std::span<const double> g, std::span<const double> h, const TreeParams& p,
                         Rng& rng, const TreeFitOptions& opts) {
  check_params(p);
  if (X.rows() != g.size() || X.rows() != h.size()) {
    throw Error(ErrorCode::ShapeMismatch, "X rows, gradient and hessian lengths differ");
  }
  if (X.rows() == 0) throw Error(ErrorCode::EmptyInput, "cannot fit a tree on zero rows");
  for (double v : h) {
    if (v < 0.0) throw Error(ErrorCode::NegativeHessian, "hessians must be nonnegative");
  }
  return RegressionBuilder(X, g, h, p, rng, opts).build();
}

std::span<const double> predict_tree(const Tree& t, std::span<const double> x) {
  if (x.size() != t.n_features) {
    throw Error(ErrorCode::ShapeMismatch, "row has " + std::to_string(x.size()) + " features, tree expects " +
                                              std::to_string(t.n_features));
  }
  std::size_t idx = 0;
  while (!t.nodes[idx].is_leaf()) {
    const auto& n = t.nodes[idx];
    idx = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
  }
  return t.nodes[idx].value;
}

}  // namespace frad
