#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frad/data.hpp"

namespace frad {

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;  // ascending source row indices
  std::vector<std::size_t> test_rows;
};

/// Per class: seeded shuffle, the first floor(train_fraction * n_c) rows go to
/// train and the rest to test. Both partitions keep source row order.
/// Throws InvalidArgument if any class has fewer than two rows.
SplitResult stratified_split(const Dataset& d, double train_fraction, std::uint64_t seed);

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> counts{};
  std::array<std::string, kNumClasses> class_names{"displacement", "insertion", "suppression"};

  std::int64_t total() const noexcept;
  std::int64_t row_sum(std::size_t k) const noexcept;
  std::int64_t col_sum(std::size_t k) const noexcept;
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred);

struct MetricsReport {
  std::string model_name;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::array<double, kNumClasses> per_class_precision{};
  std::array<double, kNumClasses> per_class_recall{};
  std::array<double, kNumClasses> per_class_f1{};
  ConfusionMatrix confusion;
};

/// One-vs-rest precision, recall and F1 per class; macro values are plain
/// means over the three classes. Empty denominators count as 0.
MetricsReport compute_metrics(const ConfusionMatrix& cm, std::string model_name = {});

/// counts[k][k] / row_sum(k); 0 for an empty row.
std::array<double, kNumClasses> per_class_recall(const ConfusionMatrix& cm) noexcept;

/// Published reference numbers (aggregate metrics and per-class rates read off
/// the confusion matrices). Missing values were not reported.
struct PaperBaseline {
  std::string model;
  std::optional<double> accuracy, f1, precision, recall;
  std::array<std::optional<double>, kNumClasses> per_class_recall;
};
const std::vector<PaperBaseline>& paper_baselines();

struct ModelEntry {
  std::string name;          // rf, gb, xgb or mlp
  std::string params_json;   // serialized hyperparameters of the fitted model
  std::string trials_file;   // empty when no search ran
  MetricsReport metrics;
};

struct ComparisonInputs {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string dataset_provenance;
  std::vector<ModelEntry> models;
};

/// Filenames written by comparison_report.
inline constexpr std::string_view kComparisonJson = "comparison.json";
inline constexpr std::string_view kComparisonMarkdown = "comparison.md";
std::string confusion_svg_name(std::string_view run_id, std::string_view model);

std::string comparison_json(const ComparisonInputs& in);
std::string comparison_markdown(const ComparisonInputs& in);
std::string confusion_svg(const MetricsReport& m, std::string_view caption);

/// Writes comparison.json, comparison.md and one confusion-matrix SVG per model
/// into out_dir. Output bytes depend only on the inputs.
void comparison_report(const ComparisonInputs& in, const std::filesystem::path& out_dir);

}  // namespace frad
