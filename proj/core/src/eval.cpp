#include "frad/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "frad/random.hpp"

namespace frad {

SplitResult stratified_split(const Dataset& d, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train_fraction must lie in (0, 1)");
  }
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    by_class[static_cast<std::size_t>(decode_label(d.labels[i]))].push_back(i);
  }

  Rng rng = derive_rng(seed, {50});
  SplitResult out;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    auto& rows = by_class[k];
    if (rows.size() < 2) {
      throw Error(ErrorCode::InvalidArgument,
                  "class " + std::string(class_name(kAllClasses[k])) + " has fewer than 2 rows; cannot split");
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(rows.size())));
    out.train_rows.insert(out.train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_rows.insert(out.test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  out.train = d.select(out.train_rows);
  out.test = d.select(out.test_rows);
  return out;
}

std::int64_t ConfusionMatrix::total() const noexcept {
  std::int64_t t = 0;
  for (const auto& row : counts) t += std::accumulate(row.begin(), row.end(), std::int64_t{0});
  return t;
}

std::int64_t ConfusionMatrix::row_sum(std::size_t k) const noexcept {
  return std::accumulate(counts[k].begin(), counts[k].end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::col_sum(std::size_t k) const noexcept {
  std::int64_t t = 0;
  for (const auto& row : counts) t += row[k];
  return t;
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) throw Error(ErrorCode::ShapeMismatch, "label vectors differ in length");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || t >= static_cast<int>(kNumClasses) || p < 0 || p >= static_cast<int>(kNumClasses)) {
      throw Error(ErrorCode::InvalidLabel, "label outside {0,1,2} at position " + std::to_string(i));
    }
    ++cm.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }
  return cm;
}

namespace {

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::array<double, kNumClasses> per_class_recall(const ConfusionMatrix& cm) noexcept {
  std::array<double, kNumClasses> out{};
  for (std::size_t k = 0; k < kNumClasses; ++k) out[k] = ratio(cm.counts[k][k], cm.row_sum(k));
  return out;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm, std::string model_name) {
  const auto total = cm.total();
  if (total < 1) throw Error(ErrorCode::EmptyInput, "confusion matrix has no entries");
  MetricsReport m;
  m.model_name = std::move(model_name);
  m.confusion = cm;

  std::int64_t trace = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) trace += cm.counts[k][k];
  m.accuracy = ratio(trace, total);

  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto tp = cm.counts[k][k];
    const auto fp = cm.col_sum(k) - tp;
    const auto fn = cm.row_sum(k) - tp;
    const double precision = ratio(tp, tp + fp);
    const double recall = ratio(tp, tp + fn);
    m.per_class_precision[k] = precision;
    m.per_class_recall[k] = recall;
    m.per_class_f1[k] = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  auto mean = [](const std::array<double, kNumClasses>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(kNumClasses);
  };
  m.macro_precision = mean(m.per_class_precision);
  m.macro_recall = mean(m.per_class_recall);
  m.macro_f1 = mean(m.per_class_f1);
  return m;
}

const std::vector<PaperBaseline>& paper_baselines() {
  static const std::vector<PaperBaseline> baselines{
      {"xgb", std::nullopt, std::nullopt, std::nullopt, std::nullopt, {0.8375, 0.8492, 0.8101}},
      {"gb", 0.8413, 0.8415, 0.8427, 0.8414, {0.8538, 0.8651, 0.8055}},
      {"rf", std::nullopt, std::nullopt, std::nullopt, std::nullopt, {std::nullopt, 0.8730, 0.7871}},
      {"mlp", 0.8459, 0.8460, 0.8466, 0.8459, {0.8597, 0.8635, 0.8147}},
  };
  return baselines;
}

}  // namespace frad
