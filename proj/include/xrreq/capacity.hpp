#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "xrreq/types.hpp"

// Required-bitrate models. Every function returns raw bits per second and
// is linear in frame rate and bit depth and inversely proportional to the
// overall compression factor.
namespace xrreq::capacity {

// Compression ratios expressed as x in "x:1". A factor of 1 is raw video.
struct CompressionProfile {
  std::string name = "raw";
  double overall_factor = 1.0;
  std::optional<double> iframe_factor;
  std::optional<double> pframe_factor;
  std::optional<double> bframe_factor;

  static CompressionProfile raw() { return {}; }
  static CompressionProfile overall(double factor, std::string name = {});

  // Throws DomainError for factors below 1 or an I-frame factor larger
  // than the P-frame factor.
  void validate() const;
};

struct VoxelSpec {
  int color_depth = 24;
  int position_depth = 48;
  std::int64_t voxels_per_frame = 0;

  int bits_per_voxel() const { return color_depth + position_depth; }
};

// Pixels one eye sees at `ppd` over the fov: (h*ppd) x (v*ppd).
double eye_like_pixels_per_eye(const FovSpec& fov, double ppd);

// Both eyes, no stereo sharing.
BitRate eye_like_capacity(const FovSpec& fov, double ppd, BitDepth depth, double fps,
                          const CompressionProfile& comp);

// A full 360x180 sphere at `ppd`, transmitted once (no per-eye copy).
BitRate full_sphere_capacity(double ppd, BitDepth depth, double fps, const CompressionProfile& comp);

// Resolution-based model. `stereo` doubles the raster for per-eye
// viewport streams; a single full-view 360 raster is mono.
BitRate hmd_capacity(const Resolution& per_eye, BitDepth depth, double fps,
                     const CompressionProfile& comp, bool stereo);

// Point-cloud video: every voxel carries color and position bits.
BitRate volumetric_capacity(const VoxelSpec& voxel, double fps, const CompressionProfile& comp);

}  // namespace xrreq::capacity
