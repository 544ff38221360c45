#include "xrreq/codec.hpp"

#include <cmath>

#include <fmt/format.h>

#include "xrreq/errors.hpp"

namespace xrreq::codec {

char to_char(FrameType type) {
  switch (type) {
    case FrameType::kI:
      return 'I';
    case FrameType::kP:
      return 'P';
    case FrameType::kB:
      return 'B';
  }
  return '?';
}

FrameType frame_type_from_char(char c) {
  switch (c) {
    case 'I':
      return FrameType::kI;
    case 'P':
      return FrameType::kP;
    case 'B':
      return FrameType::kB;
    default:
      throw DomainError(fmt::format("unknown frame type '{}'", c));
  }
}

void GopConfig::validate() const {
  if (!(gop_time_s > 0.0)) throw DomainError("GOP duration must be positive");
  if (!(fps > 0.0)) throw DomainError("frame rate must be positive");
  if (gop_time_s * fps < 1.0) {
    throw DomainError(fmt::format("GOP of {} s at {} fps holds less than one frame", gop_time_s, fps));
  }
  if (!(redundancy_fraction >= 0.0 && redundancy_fraction < 1.0)) {
    throw DomainError("redundancy fraction must lie in [0, 1)");
  }
  if (consecutive_b < 0) throw DomainError("consecutive B-frame count must be non-negative");
}

std::int64_t GopConfig::frames_per_gop() const {
  validate();
  return std::llround(gop_time_s * fps);
}

std::vector<FrameType> gop_pattern(const GopConfig& cfg) {
  const std::int64_t n = cfg.frames_per_gop();
  const std::int64_t stride = cfg.consecutive_b + 1;
  std::vector<FrameType> types(static_cast<std::size_t>(n), FrameType::kP);
  types[0] = FrameType::kI;
  for (std::int64_t i = 1; i < n; ++i) {
    // A B-frame needs the next reference frame inside this GOP.
    const std::int64_t next_ref = (i / stride + 1) * stride;
    if (i % stride != 0 && next_ref < n) types[static_cast<std::size_t>(i)] = FrameType::kB;
  }
  return types;
}

double FrameSizes::bits_for(FrameType type) const {
  switch (type) {
    case FrameType::kI:
      return i_bits;
    case FrameType::kP:
      return p_bits;
    case FrameType::kB:
      if (!b_bits) throw ConfigError("B-frame size requested but no B-frame compression factor was given");
      return *b_bits;
  }
  return 0.0;
}

double nb_pixels(const RenderSurface& s) {
  if (!(s.fov.horizontal.degrees > 0.0) || !(s.fov.vertical.degrees > 0.0)) {
    throw DomainError("field of view must be positive");
  }
  if (s.fov.extra_h.degrees < 0.0 || s.fov.extra_v.degrees < 0.0) {
    throw DomainError("timewarp margins must be non-negative");
  }
  if (!(s.extra_picture_fraction >= 0.0 && s.extra_picture_fraction < 1.0)) {
    throw DomainError("extra picture fraction must lie in [0, 1)");
  }
  const double base = 2.0 * static_cast<double>(s.per_eye.width) * static_cast<double>(s.per_eye.height);
  const double margin_h = 1.0 + s.fov.extra_h.degrees / s.fov.horizontal.degrees;
  const double margin_v = 1.0 + s.fov.extra_v.degrees / s.fov.vertical.degrees;
  const double picture = 1.0 + s.extra_picture_fraction;
  return base * margin_h * margin_v * picture * picture;
}

double frame_size(double pixel_count, BitDepth depth, double dof_fraction, double factor) {
  if (!(factor >= 1.0)) throw DomainError(fmt::format("compression factor must be >= 1 (got {})", factor));
  if (pixel_count < 0.0) throw DomainError("pixel count must be non-negative");
  if (!(dof_fraction >= 0.0 && dof_fraction < 1.0)) throw DomainError("depth-of-field fraction must lie in [0, 1)");
  return pixel_count * depth.bits_per_pixel * (1.0 + dof_fraction) / factor;
}

FrameSizes frame_sizes(const RenderSurface& surface, const capacity::CompressionProfile& comp) {
  comp.validate();
  if (!comp.iframe_factor || !comp.pframe_factor) {
    throw ConfigError(fmt::format("compression profile '{}' lacks I/P-frame factors", comp.name));
  }
  const double pixels = nb_pixels(surface);
  FrameSizes sizes;
  sizes.i_bits = frame_size(pixels, surface.depth, surface.dof_fraction, *comp.iframe_factor);
  sizes.p_bits = frame_size(pixels, surface.depth, surface.dof_fraction, *comp.pframe_factor);
  if (comp.bframe_factor) {
    sizes.b_bits = frame_size(pixels, surface.depth, surface.dof_fraction, *comp.bframe_factor);
  }
  return sizes;
}

std::int64_t p_frame_count(const GopConfig& cfg) { return cfg.frames_per_gop() - 1; }

BitRate gop_bitrate(const FrameSizes& sizes, std::int64_t n_i, std::int64_t n_p, const GopConfig& cfg,
                    std::int64_t n_b) {
  if (!(cfg.gop_time_s > 0.0)) throw DomainError("GOP duration must be positive");
  if (n_i < 1) throw DomainError("a GOP holds at least one I-frame");
  if (n_p < 0 || n_b < 0) throw DomainError("frame counts must be non-negative");
  if (!(cfg.redundancy_fraction >= 0.0 && cfg.redundancy_fraction < 1.0)) {
    throw DomainError("redundancy fraction must lie in [0, 1)");
  }
  double payload = sizes.i_bits * static_cast<double>(n_i) + sizes.p_bits * static_cast<double>(n_p);
  if (n_b > 0) payload += sizes.bits_for(FrameType::kB) * static_cast<double>(n_b);
  return BitRate{payload * (1.0 + cfg.redundancy_fraction) / cfg.gop_time_s};
}

BitRate strong_interaction_bitrate(const RenderSurface& surface, const GopConfig& cfg,
                                   const capacity::CompressionProfile& comp) {
  if (cfg.consecutive_b != 0) {
    throw ConfigError("strong-interaction streams carry only I- and P-frames");
  }
  const FrameSizes sizes = frame_sizes(surface, comp);
  return gop_bitrate(sizes, 1, p_frame_count(cfg), cfg);
}

}  // namespace xrreq::codec
