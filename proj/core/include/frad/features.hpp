#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "frad/data.hpp"

namespace frad {

/// Maps an instance to its feature row in CSV header order (label excluded).
std::array<double, kNumFeatures> featurize(const AttackInstance& inst) noexcept;

/// Per-column z-scoring fitted on training rows only.
/// Constant columns keep std = 1 so they transform to 0.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<std::string> feature_names;

  std::size_t size() const noexcept { return means.size(); }
  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

/// Column means and population standard deviations. Throws EmptyInput for a
/// matrix without rows.
Standardizer fit_standardizer(const Matrix& train, std::vector<std::string> names = {});
Matrix apply_standardizer(const Standardizer& s, const Matrix& m);
Matrix invert_standardizer(const Standardizer& s, const Matrix& z);

struct CorrelationMatrix {
  Matrix entries;
  std::vector<std::string> feature_names;
};

/// Pearson coefficients for every column pair. Any pair involving a constant
/// column is 0, including that column's diagonal entry. Needs >= 2 rows.
CorrelationMatrix pearson_correlation(const Matrix& m, std::vector<std::string> names = {});

/// Diverging palette endpoints of the heatmap: -1, 0 and +1.
inline constexpr std::string_view kHeatmapNegativeColor = "#2166ac";
inline constexpr std::string_view kHeatmapNeutralColor = "#f7f7f7";
inline constexpr std::string_view kHeatmapPositiveColor = "#b2182b";

/// Self-contained SVG: one rect per cell, values printed to two decimals.
std::string heatmap_svg(const CorrelationMatrix& c, std::string_view title = "Feature correlation");
void render_heatmap(const CorrelationMatrix& c, const std::filesystem::path& path,
                    std::string_view title = "Feature correlation");

}  // namespace frad
