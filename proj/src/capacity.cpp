#include "xrreq/capacity.hpp"

#include <fmt/format.h>

#include "xrreq/errors.hpp"

namespace xrreq::capacity {
namespace {

// Zero is a legal (degenerate) value for every multiplicative input.
void require_non_negative(double v, const char* what) {
  if (!(v >= 0.0)) throw DomainError(fmt::format("{} must be non-negative (got {})", what, v));
}

void require_factor(double f, const char* what) {
  if (!(f >= 1.0)) throw DomainError(fmt::format("{} must be >= 1 (got {})", what, f));
}

void require_depth(BitDepth depth) {
  if (depth.bits_per_pixel < 1 || depth.bits_per_pixel > 64) {
    throw DomainError(fmt::format("bits per pixel must lie in [1, 64] (got {})", depth.bits_per_pixel));
  }
}

}  // namespace

CompressionProfile CompressionProfile::overall(double factor, std::string name) {
  CompressionProfile p;
  p.name = name.empty() ? fmt::format("{}:1", factor) : std::move(name);
  p.overall_factor = factor;
  p.validate();
  return p;
}

void CompressionProfile::validate() const {
  require_factor(overall_factor, "overall compression factor");
  if (iframe_factor) require_factor(*iframe_factor, "I-frame compression factor");
  if (pframe_factor) require_factor(*pframe_factor, "P-frame compression factor");
  if (bframe_factor) require_factor(*bframe_factor, "B-frame compression factor");
  if (iframe_factor && pframe_factor && *iframe_factor > *pframe_factor) {
    throw DomainError("I-frames cannot compress more than P-frames");
  }
}

double eye_like_pixels_per_eye(const FovSpec& fov, double ppd) {
  require_non_negative(fov.horizontal.degrees, "horizontal fov");
  require_non_negative(fov.vertical.degrees, "vertical fov");
  require_non_negative(ppd, "ppd");
  return (fov.horizontal.degrees * ppd) * (fov.vertical.degrees * ppd);
}

BitRate eye_like_capacity(const FovSpec& fov, double ppd, BitDepth depth, double fps,
                          const CompressionProfile& comp) {
  require_depth(depth);
  require_non_negative(fps, "frame rate");
  comp.validate();
  const double pixels = 2.0 * eye_like_pixels_per_eye(fov, ppd);
  return BitRate{pixels * depth.bits_per_pixel * fps / comp.overall_factor};
}

BitRate full_sphere_capacity(double ppd, BitDepth depth, double fps, const CompressionProfile& comp) {
  require_non_negative(ppd, "ppd");
  require_depth(depth);
  require_non_negative(fps, "frame rate");
  comp.validate();
  const double pixels = (360.0 * ppd) * (180.0 * ppd);
  return BitRate{pixels * depth.bits_per_pixel * fps / comp.overall_factor};
}

BitRate hmd_capacity(const Resolution& per_eye, BitDepth depth, double fps, const CompressionProfile& comp,
                     bool stereo) {
  if (per_eye.width < 0 || per_eye.height < 0) throw DomainError("resolution must be non-negative");
  require_depth(depth);
  require_non_negative(fps, "frame rate");
  comp.validate();
  const double pixels =
      (stereo ? 2.0 : 1.0) * static_cast<double>(per_eye.width) * static_cast<double>(per_eye.height);
  return BitRate{pixels * depth.bits_per_pixel * fps / comp.overall_factor};
}

BitRate volumetric_capacity(const VoxelSpec& voxel, double fps, const CompressionProfile& comp) {
  if (voxel.color_depth < 0 || voxel.position_depth < 0 || voxel.voxels_per_frame < 0) {
    throw DomainError("voxel depths and counts must be non-negative");
  }
  require_non_negative(fps, "frame rate");
  comp.validate();
  return BitRate{static_cast<double>(voxel.voxels_per_frame) * voxel.bits_per_voxel() * fps /
                 comp.overall_factor};
}

}  // namespace xrreq::capacity
