#include "xrreq/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "xrreq/errors.hpp"
#include "xrreq/types.hpp"

namespace xrreq {

BitDepth BitDepth::from_bpc(int bits_per_color, Chroma chroma) {
  if (bits_per_color <= 0) throw DomainError("bits per color must be positive");
  // 4:2:0 keeps the luma plane and quarter-size chroma planes: 1.5 samples.
  const int doubled = chroma == Chroma::k444 ? 6 * bits_per_color : 3 * bits_per_color;
  if (doubled % 2 != 0) {
    throw DomainError(fmt::format("{} bpc with 4:2:0 gives a fractional bits-per-pixel", bits_per_color));
  }
  const int bpp = doubled / 2;
  if (bpp > 64) throw DomainError(fmt::format("{} bits per pixel is out of range", bpp));
  return BitDepth{bpp};
}

PrefixMode parse_prefix_mode(std::string_view text) {
  if (text == "binary") return PrefixMode::kBinary;
  if (text == "decimal") return PrefixMode::kDecimal;
  throw DomainError(fmt::format("unknown unit mode '{}' (binary|decimal)", text));
}

std::string_view to_string(PrefixMode mode) {
  return mode == PrefixMode::kBinary ? "binary" : "decimal";
}

ScaledRate scale_bitrate(BitRate rate, PrefixMode mode) {
  static constexpr std::array<const char*, 5> kBinaryUnits{"bps", "Kibps", "Mibps", "Gibps", "Tibps"};
  static constexpr std::array<const char*, 5> kDecimalUnits{"bps", "Kbps", "Mbps", "Gbps", "Tbps"};
  const double base = mode == PrefixMode::kBinary ? 1024.0 : 1000.0;
  const auto& units = mode == PrefixMode::kBinary ? kBinaryUnits : kDecimalUnits;

  double value = rate.bits_per_second;
  std::size_t idx = 0;
  while (idx + 1 < units.size() && std::abs(value) >= base) {
    value /= base;
    ++idx;
  }
  return {value, units[idx]};
}

std::string format_bitrate(BitRate rate, PrefixMode mode, int decimals) {
  const auto scaled = scale_bitrate(rate, mode);
  return fmt::format("{:.{}f} {}", scaled.value, decimals, scaled.unit);
}

namespace {

double parse_number_prefix(std::string_view text, std::string_view& rest) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr == begin) {
    throw DomainError(fmt::format("'{}' is not a number", text));
  }
  rest = std::string_view(ptr, static_cast<std::size_t>(end - ptr));
  return value;
}

bool consume_suffix(std::string_view& text, std::string_view suffix) {
  if (text.size() >= suffix.size() && text.substr(text.size() - suffix.size()) == suffix) {
    text.remove_suffix(suffix.size());
    return true;
  }
  return false;
}

}  // namespace

BitRate parse_bitrate(std::string_view text) {
  std::string_view unit;
  const double value = parse_number_prefix(text, unit);
  consume_suffix(unit, "bps") || consume_suffix(unit, "b/s");

  double multiplier = 1.0;
  if (unit.empty()) {
    multiplier = 1.0;
  } else if (unit == "K" || unit == "k") {
    multiplier = 1e3;
  } else if (unit == "M") {
    multiplier = 1e6;
  } else if (unit == "G") {
    multiplier = 1e9;
  } else if (unit == "T") {
    multiplier = 1e12;
  } else if (unit == "Ki") {
    multiplier = kKi;
  } else if (unit == "Mi") {
    multiplier = kMi;
  } else if (unit == "Gi") {
    multiplier = kGi;
  } else if (unit == "Ti") {
    multiplier = kTi;
  } else {
    throw DomainError(fmt::format("unknown rate suffix in '{}'", text));
  }
  if (std::isnan(value) || value < 0.0) throw DomainError(fmt::format("rate '{}' must be a non-negative number", text));
  return BitRate{value * multiplier};
}

double parse_duration_ms(std::string_view text) {
  std::string_view unit;
  const double value = parse_number_prefix(text, unit);
  if (!std::isfinite(value)) throw DomainError(fmt::format("duration '{}' must be finite", text));
  if (unit.empty() || unit == "ms") return value;
  if (unit == "s") return value * 1e3;
  if (unit == "us") return value * 1e-3;
  throw DomainError(fmt::format("unknown time suffix in '{}' (us|ms|s)", text));
}

std::string format_percent(double percent, int max_decimals) {
  std::string s = fmt::format("{:.{}f}", percent, max_decimals);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

}  // namespace xrreq
