#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace frad::svg {

struct Rgb {
  std::uint8_t r, g, b;
};

Rgb parse_hex(std::string_view hex);
std::string to_hex(Rgb c);
Rgb lerp(Rgb a, Rgb b, double t);

/// Maps v in [-1, 1] onto negative -> neutral -> positive.
std::string diverging(double v, std::string_view negative, std::string_view neutral, std::string_view positive);

std::string escape(std::string_view text);
/// Fixed two-decimal formatting, locale-independent.
std::string fixed2(double v);

/// Dark text on light cells, light text on dark cells.
std::string_view text_color_for(Rgb background);

}  // namespace frad::svg
