#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "frad/matrix.hpp"

namespace frad {

/// The three front-running attack categories.
enum class AttackClass : std::uint8_t { Displacement, Insertion, Suppression };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<AttackClass, kNumClasses> kAllClasses{
    AttackClass::Displacement, AttackClass::Insertion, AttackClass::Suppression};

std::string_view class_name(AttackClass c) noexcept;

/// Integer label code. 0 = Displacement, 1 = Insertion, 2 = Suppression.
struct LabelId {
  int value = 0;
  friend bool operator==(LabelId, LabelId) = default;
  friend auto operator<=>(LabelId, LabelId) = default;
};

LabelId encode_label(AttackClass c) noexcept;
/// Throws Error(InvalidLabel) for codes outside {0, 1, 2}.
AttackClass decode_label(LabelId id);

/// One raw front-running scenario: attacker and victim transaction facts as
/// observable from public chain data.
struct AttackInstance {
  int attacker_tx_count = 1;
  double gas_price_ratio = 1.0;        // attacker max gas price / victim gas price
  double victim_gas_price_gwei = 1.0;
  double attacker_gas_used = 1.0;      // summed over attacker transactions
  double victim_gas_used = 1.0;
  double victim_value_eth = 0.0;
  double attacker_value_eth = 0.0;
  int block_position_delta = 0;        // victim index - first attacker index
  int same_block = 0;
  int victim_failed = 0;
  int interval_blocks = 1;
  double cumulative_attacker_fee_eth = 0.0;
  double gas_limit_utilization = 0.0;  // in [0, 1]
  AttackClass label = AttackClass::Displacement;

  friend bool operator==(const AttackInstance&, const AttackInstance&) = default;
};

/// Throws Error(InvalidArgument) naming the first violated field bound.
void validate(const AttackInstance& inst);

inline constexpr std::size_t kNumFeatures = 13;

/// Feature column names in CSV header order (label column excluded).
const std::array<std::string, kNumFeatures>& feature_schema();
std::vector<std::string> feature_names();

inline constexpr std::string_view kProvenanceSynthetic = "synthetic";
inline constexpr std::string_view kProvenanceIngested = "ingested";

struct Dataset {
  Matrix features;
  std::vector<LabelId> labels;
  std::vector<std::string> feature_names;
  std::string provenance;

  std::size_t n_rows() const noexcept { return labels.size(); }
  std::size_t n_features() const noexcept { return feature_names.size(); }

  /// Subset of rows in the given order, keeping schema and provenance.
  Dataset select(std::span<const std::size_t> rows) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Checks shape consistency, label range and finiteness of every value.
void validate(const Dataset& d);

std::vector<int> label_codes(const Dataset& d);

/// Parses a dataset CSV. Every failure names the 1-based data row.
Dataset load_dataset(const std::filesystem::path& path);

/// Feature rows from a CSV whose header is the feature schema, optionally
/// followed by the label column (which is then ignored).
Matrix load_feature_rows(const std::filesystem::path& path);

/// Writes via a temporary sibling file and an atomic rename. Output is a pure
/// function of the dataset contents.
void save_dataset(const Dataset& d, const std::filesystem::path& path);

/// Shortest decimal representation that parses back to exactly `v`.
std::string format_double(double v);

/// Writes `contents` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace frad
