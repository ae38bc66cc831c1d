#include "frad/features.hpp"

#include <algorithm>
#include <cmath>

#include "svg.hpp"

namespace frad {

std::array<double, kNumFeatures> featurize(const AttackInstance& inst) noexcept {
  return {static_cast<double>(inst.attacker_tx_count),
          inst.gas_price_ratio,
          inst.victim_gas_price_gwei,
          inst.attacker_gas_used,
          inst.victim_gas_used,
          inst.victim_value_eth,
          inst.attacker_value_eth,
          static_cast<double>(inst.block_position_delta),
          static_cast<double>(inst.same_block),
          static_cast<double>(inst.victim_failed),
          static_cast<double>(inst.interval_blocks),
          inst.cumulative_attacker_fee_eth,
          inst.gas_limit_utilization};
}

namespace {

std::vector<std::string> names_or_default(std::vector<std::string> names, std::size_t cols) {
  if (names.empty()) {
    names.reserve(cols);
    for (std::size_t j = 0; j < cols; ++j) names.push_back("f" + std::to_string(j));
  }
  if (names.size() != cols) throw Error(ErrorCode::ShapeMismatch, "feature name count does not match columns");
  return names;
}

}  // namespace

Standardizer fit_standardizer(const Matrix& train, std::vector<std::string> names) {
  if (train.rows() == 0) throw Error(ErrorCode::EmptyInput, "cannot fit a standardizer on zero rows");
  const std::size_t n = train.rows();
  const std::size_t p = train.cols();
  Standardizer s;
  s.feature_names = names_or_default(std::move(names), p);
  s.means.assign(p, 0.0);
  s.stds.assign(p, 1.0);
  for (std::size_t j = 0; j < p; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += train(i, j);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = train(i, j) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.means[j] = mean;
    s.stds[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Matrix apply_standardizer(const Standardizer& s, const Matrix& m) {
  if (m.rows() > 0 && m.cols() != s.size()) {
    throw Error(ErrorCode::ShapeMismatch, "column count " + std::to_string(m.cols()) + " does not match standardizer " +
                                              std::to_string(s.size()));
  }
  Matrix out(m.rows(), s.size());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) out(i, j) = (m(i, j) - s.means[j]) / s.stds[j];
  }
  return out;
}

Matrix invert_standardizer(const Standardizer& s, const Matrix& z) {
  if (z.rows() > 0 && z.cols() != s.size()) throw Error(ErrorCode::ShapeMismatch, "column count mismatch");
  Matrix out(z.rows(), s.size());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) out(i, j) = z(i, j) * s.stds[j] + s.means[j];
  }
  return out;
}

CorrelationMatrix pearson_correlation(const Matrix& m, std::vector<std::string> names) {
  if (m.rows() < 2) throw Error(ErrorCode::EmptyInput, "correlation needs at least two rows");
  const std::size_t n = m.rows();
  const std::size_t p = m.cols();

  std::vector<std::vector<double>> centered(p, std::vector<double>(n));
  std::vector<double> norm(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += m(i, j);
    const double mean = sum / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      centered[j][i] = m(i, j) - mean;
      norm[j] += centered[j][i] * centered[j][i];
    }
    norm[j] = std::sqrt(norm[j]);
  }

  CorrelationMatrix c;
  c.feature_names = names_or_default(std::move(names), p);
  c.entries = Matrix(p, p, 0.0);
  for (std::size_t a = 0; a < p; ++a) {
    if (norm[a] == 0.0) continue;
    c.entries(a, a) = 1.0;
    for (std::size_t b = a + 1; b < p; ++b) {
      if (norm[b] == 0.0) continue;
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += centered[a][i] * centered[b][i];
      const double r = std::clamp(dot / (norm[a] * norm[b]), -1.0, 1.0);
      c.entries(a, b) = r;
      c.entries(b, a) = r;
    }
  }
  return c;
}

std::string heatmap_svg(const CorrelationMatrix& c, std::string_view title) {
  const std::size_t p = c.entries.rows();
  constexpr int cell = 48;
  constexpr int left = 230;
  constexpr int top = 50;
  const int grid = static_cast<int>(p) * cell;
  const int bottom = 230;
  const int width = left + grid + 110;
  const int height = top + grid + bottom;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<text x=\"" + std::to_string(left) + "\" y=\"28\" font-size=\"16\">" + svg::escape(title) + "</text>\n";
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double v = c.entries(i, j);
      const std::string fill =
          svg::diverging(v, kHeatmapNegativeColor, kHeatmapNeutralColor, kHeatmapPositiveColor);
      const int x = left + static_cast<int>(j) * cell;
      const int y = top + static_cast<int>(i) * cell;
      out += "<rect class=\"cell\" x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
             std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"" + fill + "\"/>\n";
      out += "<text x=\"" + std::to_string(x + cell / 2) + "\" y=\"" + std::to_string(y + cell / 2 + 4) +
             "\" text-anchor=\"middle\" fill=\"" + std::string(svg::text_color_for(svg::parse_hex(fill))) + "\">" +
             svg::fixed2(v) + "</text>\n";
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    const auto& name = svg::escape(c.feature_names[i]);
    const int mid = static_cast<int>(i) * cell + cell / 2;
    out += "<text x=\"" + std::to_string(left - 6) + "\" y=\"" + std::to_string(top + mid + 4) +
           "\" text-anchor=\"end\">" + name + "</text>\n";
    const int lx = left + mid;
    const int ly = top + grid + 8;
    out += "<text x=\"" + std::to_string(lx) + "\" y=\"" + std::to_string(ly) + "\" text-anchor=\"end\" transform=\"rotate(-60 " +
           std::to_string(lx) + " " + std::to_string(ly) + ")\">" + name + "</text>\n";
  }
  // Legend: vertical gradient from +1 (top) to -1 (bottom).
  const int lx = left + grid + 30;
  out += "<defs><linearGradient id=\"scale\" x1=\"0\" y1=\"0\" x2=\"0\" y2=\"1\">";
  out += "<stop offset=\"0\" stop-color=\"" + std::string(kHeatmapPositiveColor) + "\"/>";
  out += "<stop offset=\"0.5\" stop-color=\"" + std::string(kHeatmapNeutralColor) + "\"/>";
  out += "<stop offset=\"1\" stop-color=\"" + std::string(kHeatmapNegativeColor) + "\"/>";
  out += "</linearGradient></defs>\n";
  out += "<rect class=\"legend\" x=\"" + std::to_string(lx) + "\" y=\"" + std::to_string(top) + "\" width=\"16\" height=\"" +
         std::to_string(grid) + "\" fill=\"url(#scale)\"/>\n";
  out += "<text x=\"" + std::to_string(lx + 22) + "\" y=\"" + std::to_string(top + 10) + "\">+1</text>\n";
  out += "<text x=\"" + std::to_string(lx + 22) + "\" y=\"" + std::to_string(top + grid / 2 + 4) + "\">0</text>\n";
  out += "<text x=\"" + std::to_string(lx + 22) + "\" y=\"" + std::to_string(top + grid) + "\">-1</text>\n";
  out += "</svg>\n";
  return out;
}

void render_heatmap(const CorrelationMatrix& c, const std::filesystem::path& path, std::string_view title) {
  write_file_atomic(path, heatmap_svg(c, title));
}

}  // namespace frad
