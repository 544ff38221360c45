#pragma once

#include <string>
#include <string_view>

#include "xrreq/types.hpp"

namespace xrreq {

// The literature mixes 2^10-based and 10^3-based rate prefixes; callers
// always choose one explicitly.
enum class PrefixMode { kBinary, kDecimal };

PrefixMode parse_prefix_mode(std::string_view text);
std::string_view to_string(PrefixMode mode);

inline constexpr double kKi = 1024.0;
inline constexpr double kMi = kKi * 1024.0;
inline constexpr double kGi = kMi * 1024.0;
inline constexpr double kTi = kGi * 1024.0;

struct ScaledRate {
  double value = 0.0;
  std::string unit;  // "Gibps", "Mbps", ...
};

// Picks the largest prefix for which the scaled value is >= 1.
ScaledRate scale_bitrate(BitRate rate, PrefixMode mode);

// "4.62 Gibps" / "91.04 Mbps".
std::string format_bitrate(BitRate rate, PrefixMode mode, int decimals = 2);

// Value of `rate` in the given unit, e.g. in_units(r, kMi) for Mi-bps.
constexpr double in_units(BitRate rate, double divisor) { return rate.bits_per_second / divisor; }

// Rate literals: plain numbers are bps; K/M/G/T are decimal and
// Ki/Mi/Gi/Ti binary. A trailing "bps" is accepted ("140Mbps").
BitRate parse_bitrate(std::string_view text);

// Time literals in milliseconds; accepted suffixes: us, ms, s. A bare
// number is taken as milliseconds.
double parse_duration_ms(std::string_view text);

// Decimal rendering of a percentage with up to `max_decimals` digits and
// trailing zeros removed ("99.9983", "99.99928").
std::string format_percent(double percent, int max_decimals = 5);

}  // namespace xrreq
