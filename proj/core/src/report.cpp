#include <charconv>

#include <json.hpp>

#include "frad/eval.hpp"
#include "svg.hpp"

namespace frad {

namespace {

using json = nlohmann::ordered_json;

constexpr std::string_view kConfusionLow = "#f7fbff";
constexpr std::string_view kConfusionHigh = "#08306b";
constexpr std::string_view kZeroConventionNote =
    "Precision, recall and F1 are macro averages over the three classes; a class with an empty denominator "
    "contributes 0.";

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json metrics_json(const MetricsReport& m) {
  json j;
  j["accuracy"] = m.accuracy;
  j["macro_f1"] = m.macro_f1;
  j["macro_precision"] = m.macro_precision;
  j["macro_recall"] = m.macro_recall;
  j["per_class_precision"] = m.per_class_precision;
  j["per_class_recall"] = m.per_class_recall;
  j["per_class_f1"] = m.per_class_f1;
  return j;
}

json confusion_json(const ConfusionMatrix& cm) {
  json j;
  j["class_names"] = cm.class_names;
  j["rows_true_cols_predicted"] = cm.counts;
  return j;
}

json baselines_json() {
  json models = json::array();
  for (const auto& b : paper_baselines()) {
    json m;
    m["model"] = b.model;
    m["accuracy"] = optional_number(b.accuracy);
    m["f1"] = optional_number(b.f1);
    m["precision"] = optional_number(b.precision);
    m["recall"] = optional_number(b.recall);
    json pcr = json::array();
    for (const auto& v : b.per_class_recall) pcr.push_back(optional_number(v));
    m["per_class_recall"] = pcr;
    models.push_back(m);
  }
  json j;
  j["source"] = "published FRAD evaluation on 9798 labelled Ethereum transactions; null = not reported";
  j["models"] = models;
  return j;
}

const PaperBaseline* baseline_for(std::string_view model) {
  for (const auto& b : paper_baselines()) {
    if (b.model == model) return &b;
  }
  return nullptr;
}

std::string fixed4(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 4);
  return {buf, ptr};
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "n/r";
  return fixed4(*v);
}

}  // namespace

std::string confusion_svg_name(std::string_view run_id, std::string_view model) {
  return std::string(run_id) + "_" + std::string(model) + "_confusion.svg";
}

std::string comparison_json(const ComparisonInputs& in) {
  json j;
  j["run_id"] = in.run_id;
  j["seed"] = in.seed;
  j["config_hash"] = in.config_hash;
  j["dataset_provenance"] = in.dataset_provenance;
  json models = json::array();
  for (const auto& m : in.models) {
    json e;
    e["name"] = m.name;
    e["params"] = m.params_json.empty() ? json::object() : json::parse(m.params_json);
    e["metrics"] = metrics_json(m.metrics);
    e["confusion"] = confusion_json(m.metrics.confusion);
    e["trials_file"] = m.trials_file.empty() ? json(nullptr) : json(m.trials_file);
    models.push_back(e);
  }
  j["models"] = models;
  j["paper_baselines"] = baselines_json();
  j["notes"] = kZeroConventionNote;
  return j.dump(2) + "\n";
}

std::string comparison_markdown(const ComparisonInputs& in) {
  std::string out;
  out += "# Model comparison\n\n";
  out += "Run `" + in.run_id + "`, seed " + std::to_string(in.seed) + ", config hash `" + in.config_hash +
         "`, dataset: " + in.dataset_provenance + ".\n\n";
  out += "| Model | Accuracy | F1 | Precision | Recall | Ref. accuracy | Ref. F1 | Ref. precision | Ref. recall |\n";
  out += "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& m : in.models) {
    const auto* b = baseline_for(m.name);
    const auto& r = m.metrics;
    out += "| " + m.name + " | " + fixed4(r.accuracy) + " | " + fixed4(r.macro_f1) + " | " + fixed4(r.macro_precision) +
           " | " + fixed4(r.macro_recall) + " | " + (b ? cell(b->accuracy) : "n/r") + " | " +
           (b ? cell(b->f1) : "n/r") + " | " + (b ? cell(b->precision) : "n/r") + " | " +
           (b ? cell(b->recall) : "n/r") + " |\n";
  }
  out += "\n## Per-class recall\n\n";
  out += "| Model | Displacement | Insertion | Suppression | Ref. displacement | Ref. insertion | Ref. suppression |\n";
  out += "|---|---|---|---|---|---|---|\n";
  for (const auto& m : in.models) {
    const auto* b = baseline_for(m.name);
    out += "| " + m.name;
    for (double v : m.metrics.per_class_recall) out += " | " + fixed4(v);
    for (std::size_t k = 0; k < kNumClasses; ++k) out += " | " + (b ? cell(b->per_class_recall[k]) : "n/r");
    out += " |\n";
  }
  out += "\n## Published reference results\n\n";
  out += "| Model | Accuracy | F1 | Precision | Recall | Displacement | Insertion | Suppression |\n";
  out += "|---|---|---|---|---|---|---|---|\n";
  for (const auto& b : paper_baselines()) {
    out += "| " + b.model + " | " + cell(b.accuracy) + " | " + cell(b.f1) + " | " + cell(b.precision) + " | " +
           cell(b.recall);
    for (const auto& r : b.per_class_recall) out += " | " + cell(r);
    out += " |\n";
  }
  out += "\nReference values are the published results on the original (non-public) dataset; n/r = not reported.\n";
  out += std::string(kZeroConventionNote) + "\n";
  return out;
}

std::string confusion_svg(const MetricsReport& m, std::string_view caption) {
  constexpr int cell_size = 110;
  constexpr int left = 130;
  constexpr int top = 70;
  constexpr int grid = static_cast<int>(kNumClasses) * cell_size;
  const auto low = svg::parse_hex(kConfusionLow);
  const auto high = svg::parse_hex(kConfusionHigh);
  const auto& cm = m.confusion;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(left + grid + 30) + "\" height=\"" +
         std::to_string(top + grid + 70) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<text x=\"10\" y=\"24\" font-size=\"16\">" + svg::escape(m.model_name) + " confusion matrix</text>\n";
  out += "<text x=\"10\" y=\"44\" font-size=\"10\">" + svg::escape(caption) + "</text>\n";
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    const auto row_total = cm.row_sum(i);
    for (std::size_t j = 0; j < kNumClasses; ++j) {
      const double frac = row_total > 0 ? static_cast<double>(cm.counts[i][j]) / static_cast<double>(row_total) : 0.0;
      const auto fill = svg::lerp(low, high, frac);
      const int x = left + static_cast<int>(j) * cell_size;
      const int y = top + static_cast<int>(i) * cell_size;
      const std::string text_fill(svg::text_color_for(fill));
      out += "<rect class=\"cell\" x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
             std::to_string(cell_size) + "\" height=\"" + std::to_string(cell_size) + "\" fill=\"" + svg::to_hex(fill) +
             "\" stroke=\"#ffffff\"/>\n";
      out += "<text x=\"" + std::to_string(x + cell_size / 2) + "\" y=\"" + std::to_string(y + cell_size / 2 - 4) +
             "\" text-anchor=\"middle\" fill=\"" + text_fill + "\">" + std::to_string(cm.counts[i][j]) + "</text>\n";
      out += "<text x=\"" + std::to_string(x + cell_size / 2) + "\" y=\"" + std::to_string(y + cell_size / 2 + 14) +
             "\" text-anchor=\"middle\" fill=\"" + text_fill + "\">" + svg::fixed2(100.0 * frac) + "%</text>\n";
    }
    const int mid = static_cast<int>(i) * cell_size + cell_size / 2;
    out += "<text x=\"" + std::to_string(left - 8) + "\" y=\"" + std::to_string(top + mid + 4) +
           "\" text-anchor=\"end\">" + svg::escape(cm.class_names[i]) + "</text>\n";
    out += "<text x=\"" + std::to_string(left + mid) + "\" y=\"" + std::to_string(top + grid + 18) +
           "\" text-anchor=\"middle\">" + svg::escape(cm.class_names[i]) + "</text>\n";
  }
  out += "<text x=\"" + std::to_string(left + grid / 2) + "\" y=\"" + std::to_string(top + grid + 40) +
         "\" text-anchor=\"middle\">predicted</text>\n";
  out += "<text x=\"14\" y=\"" + std::to_string(top + grid / 2) + "\" transform=\"rotate(-90 14 " +
         std::to_string(top + grid / 2) + ")\" text-anchor=\"middle\">true</text>\n";
  out += "</svg>\n";
  return out;
}

void comparison_report(const ComparisonInputs& in, const std::filesystem::path& out_dir) {
  if (in.models.empty()) throw Error(ErrorCode::InvalidArgument, "comparison report needs at least one model");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Unwritable, "cannot create " + out_dir.string());
  write_file_atomic(out_dir / kComparisonJson, comparison_json(in));
  write_file_atomic(out_dir / kComparisonMarkdown, comparison_markdown(in));
  const std::string caption = "run " + in.run_id + ", seed " + std::to_string(in.seed) + ", config " + in.config_hash;
  for (const auto& m : in.models) {
    write_file_atomic(out_dir / confusion_svg_name(in.run_id, m.name), confusion_svg(m.metrics, caption));
  }
}

}  // namespace frad
