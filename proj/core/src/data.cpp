#include "frad/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace frad {

std::string_view class_name(AttackClass c) noexcept {
  switch (c) {
    case AttackClass::Displacement: return "displacement";
    case AttackClass::Insertion: return "insertion";
    case AttackClass::Suppression: return "suppression";
  }
  return "unknown";
}

LabelId encode_label(AttackClass c) noexcept { return LabelId{static_cast<int>(c)}; }

AttackClass decode_label(LabelId id) {
  if (id.value < 0 || id.value >= static_cast<int>(kNumClasses)) {
    throw Error(ErrorCode::InvalidLabel, "label id " + std::to_string(id.value) + " is not in {0,1,2}");
  }
  return static_cast<AttackClass>(id.value);
}

void validate(const AttackInstance& inst) {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidArgument, std::string("attack instance: ") + what); };
  if (inst.attacker_tx_count < 1) fail("attacker_tx_count must be >= 1");
  if (!(inst.gas_price_ratio > 0.0)) fail("gas_price_ratio must be positive");
  if (!(inst.victim_gas_price_gwei > 0.0)) fail("victim_gas_price_gwei must be positive");
  if (!(inst.attacker_gas_used > 0.0)) fail("attacker_gas_used must be positive");
  if (!(inst.victim_gas_used > 0.0)) fail("victim_gas_used must be positive");
  if (!(inst.victim_value_eth >= 0.0)) fail("victim_value_eth must be nonnegative");
  if (!(inst.attacker_value_eth >= 0.0)) fail("attacker_value_eth must be nonnegative");
  if (inst.same_block != 0 && inst.same_block != 1) fail("same_block must be 0 or 1");
  if (inst.victim_failed != 0 && inst.victim_failed != 1) fail("victim_failed must be 0 or 1");
  if (inst.interval_blocks < 1) fail("interval_blocks must be >= 1");
  if (!(inst.cumulative_attacker_fee_eth >= 0.0)) fail("cumulative_attacker_fee_eth must be nonnegative");
  if (!(inst.gas_limit_utilization >= 0.0 && inst.gas_limit_utilization <= 1.0)) {
    fail("gas_limit_utilization must lie in [0,1]");
  }
  if (inst.label == AttackClass::Insertion && inst.attacker_tx_count != 2) fail("insertion requires 2 attacker transactions");
  if (inst.label == AttackClass::Displacement && inst.attacker_tx_count != 1) fail("displacement requires 1 attacker transaction");
}

const std::array<std::string, kNumFeatures>& feature_schema() {
  static const std::array<std::string, kNumFeatures> names{
      "attacker_tx_count",     "gas_price_ratio",       "victim_gas_price_gwei",
      "attacker_gas_used",     "victim_gas_used",       "victim_value_eth",
      "attacker_value_eth",    "block_position_delta",  "same_block",
      "victim_failed",         "interval_blocks",       "cumulative_attacker_fee_eth",
      "gas_limit_utilization"};
  return names;
}

std::vector<std::string> feature_names() {
  const auto& s = feature_schema();
  return {s.begin(), s.end()};
}

Dataset Dataset::select(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = features.select_rows(rows);
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(labels[r]);
  out.feature_names = feature_names;
  out.provenance = provenance;
  return out;
}

void validate(const Dataset& d) {
  if (d.features.rows() != d.labels.size()) {
    throw Error(ErrorCode::ShapeMismatch, "feature rows and label count differ");
  }
  if (d.features.rows() > 0 && d.features.cols() != d.feature_names.size()) {
    throw Error(ErrorCode::ShapeMismatch, "feature columns and feature_names differ");
  }
  for (std::size_t r = 0; r < d.features.rows(); ++r) {
    for (double v : d.features.row(r)) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteField, "non-finite feature value", r + 1);
    }
    decode_label(d.labels[r]);
  }
}

std::vector<int> label_codes(const Dataset& d) {
  std::vector<int> out;
  out.reserve(d.labels.size());
  for (auto l : d.labels) out.push_back(l.value);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error(ErrorCode::InvalidArgument, "cannot format value");
  return {buf, ptr};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Unwritable, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::Unwritable, "write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Unwritable, "cannot rename into " + path.string());
  }
}

namespace {

std::string header_line() {
  std::string h;
  for (const auto& name : feature_schema()) {
    h += name;
    h += ',';
  }
  h += "label";
  return h;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingFile, "no such file: " + path.string());
  const std::string text = read_file(path);

  Dataset d;
  d.feature_names = feature_names();
  d.provenance = std::string(kProvenanceIngested);
  d.features = Matrix(0, kNumFeatures);

  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != header_line()) {
    throw Error(ErrorCode::SchemaMismatch, "header does not match the dataset schema in " + path.string());
  }

  std::array<double, kNumFeatures> row{};
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    std::string_view view = trim(line);
    if (view.empty()) continue;
    ++row_no;
    auto fields = split_fields(view);
    if (fields.size() != kNumFeatures + 1) {
      throw Error(ErrorCode::MalformedRow,
                  "expected " + std::to_string(kNumFeatures + 1) + " fields, got " + std::to_string(fields.size()),
                  row_no);
    }
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
      auto f = trim(fields[j]);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw Error(ErrorCode::MalformedRow, "cannot parse field '" + feature_schema()[j] + "'", row_no);
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteField, "field '" + feature_schema()[j] + "' is not finite", row_no);
      }
      row[j] = v;
    }
    auto lf = trim(fields[kNumFeatures]);
    long long code = 0;
    auto [ptr, ec] = std::from_chars(lf.data(), lf.data() + lf.size(), code);
    if (ec != std::errc{} || ptr != lf.data() + lf.size()) {
      throw Error(ErrorCode::MalformedRow, "label is not an integer", row_no);
    }
    if (code < 0 || code >= static_cast<long long>(kNumClasses)) {
      throw Error(ErrorCode::UnknownLabel, "label value " + std::to_string(code) + " is not in {0,1,2}", row_no);
    }
    d.features.append_row(row);
    d.labels.push_back(LabelId{static_cast<int>(code)});
  }
  return d;
}

Matrix load_feature_rows(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingFile, "no such file: " + path.string());
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::string features_only = header_line();
  features_only.resize(features_only.size() - std::string_view(",label").size());
  if (!std::getline(in, line)) throw Error(ErrorCode::SchemaMismatch, "empty file " + path.string());
  const auto header = trim(line);
  std::size_t expected = 0;
  if (header == header_line()) {
    expected = kNumFeatures + 1;
  } else if (header == features_only) {
    expected = kNumFeatures;
  } else {
    throw Error(ErrorCode::SchemaMismatch, "header does not match the feature schema in " + path.string());
  }

  Matrix out(0, kNumFeatures);
  std::array<double, kNumFeatures> row{};
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    auto view = trim(line);
    if (view.empty()) continue;
    ++row_no;
    auto fields = split_fields(view);
    if (fields.size() != expected) throw Error(ErrorCode::MalformedRow, "wrong number of fields", row_no);
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
      auto f = trim(fields[j]);
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[j]);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw Error(ErrorCode::MalformedRow, "cannot parse field '" + feature_schema()[j] + "'", row_no);
      }
      if (!std::isfinite(row[j])) {
        throw Error(ErrorCode::NonFiniteField, "field '" + feature_schema()[j] + "' is not finite", row_no);
      }
    }
    out.append_row(row);
  }
  return out;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  validate(d);
  if (d.feature_names != feature_names()) {
    throw Error(ErrorCode::SchemaMismatch, "dataset columns do not follow the CSV schema");
  }
  std::string out = header_line();
  out += '\n';
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    for (double v : d.features.row(r)) {
      out += format_double(v);
      out += ',';
    }
    out += std::to_string(d.labels[r].value);
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace frad
