#pragma once

#include <cstdint>
#include <numbers>

namespace xrreq {

// Pixel dimensions of a raster (per eye unless stated otherwise).
struct Resolution {
  std::int64_t width = 1;
  std::int64_t height = 1;

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

// Physical panel dimensions in inches.
struct PhysicalSize {
  double width_in = 0.0;
  double height_in = 0.0;
};

// Angles are carried in degrees on every public interface. Radian
// conversion is exact (180/pi), never the 57.3 shortcut.
struct Angle {
  double degrees = 0.0;

  static constexpr Angle from_radians(double rad) { return Angle{rad * 180.0 / std::numbers::pi}; }
  constexpr double radians() const { return degrees * std::numbers::pi / 180.0; }

  friend bool operator==(const Angle&, const Angle&) = default;
};

// Per-eye field of view plus the timewarp margins rendered beyond it.
struct FovSpec {
  Angle horizontal;
  Angle vertical;
  Angle extra_h;
  Angle extra_v;
};

enum class Chroma { k444, k420 };

// Bits per pixel. 4:4:4 carries three full channels, 4:2:0 averages 1.5
// samples per pixel, so 8/10/12/16 bpc map to 12/15/18/24 bpp.
struct BitDepth {
  int bits_per_pixel = 24;

  static BitDepth from_bpc(int bits_per_color, Chroma chroma);

  friend bool operator==(const BitDepth&, const BitDepth&) = default;
};

// Raw bits per second; prefixes are a formatting concern (see units.hpp).
struct BitRate {
  double bits_per_second = 0.0;

  friend auto operator<=>(const BitRate&, const BitRate&) = default;
};

}  // namespace xrreq
