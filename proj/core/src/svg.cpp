#include "svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "frad/error.hpp"

namespace frad::svg {

Rgb parse_hex(std::string_view hex) {
  if (hex.size() != 7 || hex[0] != '#') throw Error(ErrorCode::InvalidArgument, "bad color literal");
  auto channel = [&](std::size_t pos) {
    unsigned v = 0;
    std::from_chars(hex.data() + pos, hex.data() + pos + 2, v, 16);
    return static_cast<std::uint8_t>(v);
  };
  return {channel(1), channel(3), channel(5)};
}

std::string to_hex(Rgb c) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out = "#";
  for (auto v : {c.r, c.g, c.b}) {
    out += digits[v >> 4];
    out += digits[v & 0xF];
  }
  return out;
}

Rgb lerp(Rgb a, Rgb b, double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto mix = [t](std::uint8_t x, std::uint8_t y) {
    return static_cast<std::uint8_t>(std::lround(x + (static_cast<double>(y) - x) * t));
  };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

std::string diverging(double v, std::string_view negative, std::string_view neutral, std::string_view positive) {
  v = std::clamp(v, -1.0, 1.0);
  const Rgb mid = parse_hex(neutral);
  if (v >= 0.0) return to_hex(lerp(mid, parse_hex(positive), v));
  return to_hex(lerp(mid, parse_hex(negative), -v));
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string fixed2(double v) {
  char buf[64];
  // Avoid printing "-0.00".
  if (std::abs(v) < 0.005) v = 0.0;
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return {buf, ptr};
}

std::string_view text_color_for(Rgb background) {
  const double luminance = 0.299 * background.r + 0.587 * background.g + 0.114 * background.b;
  return luminance < 128.0 ? "#ffffff" : "#000000";
}

}  // namespace frad::svg
