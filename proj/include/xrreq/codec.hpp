#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "xrreq/capacity.hpp"
#include "xrreq/types.hpp"

// GOP-structured frame sizing for rendered VR streams, including the
// timewarp margins and redundancy overhead.
namespace xrreq::codec {

enum class FrameType { kI, kP, kB };

char to_char(FrameType type);
FrameType frame_type_from_char(char c);

// One closed GOP: an I-frame followed by inter frames. With
// `consecutive_b` > 0, B-frames are inserted between reference frames,
// and only where a later reference inside the same GOP exists.
struct GopConfig {
  double gop_time_s = 2.0;
  double fps = 90.0;
  double redundancy_fraction = 0.10;
  int consecutive_b = 0;

  void validate() const;
  // round(gop_time * fps)
  std::int64_t frames_per_gop() const;
};

// Frame types of one GOP in display order.
std::vector<FrameType> gop_pattern(const GopConfig& cfg);

struct RenderSurface {
  Resolution per_eye;
  FovSpec fov;
  double extra_picture_fraction = 0.10;
  double dof_fraction = 0.15;
  BitDepth depth;
};

struct FrameSizes {
  double i_bits = 0.0;
  double p_bits = 0.0;
  std::optional<double> b_bits;

  double bits_for(FrameType type) const;
};

// Rendered pixels per stereo frame including timewarp margins and the
// extra picture area on both axes.
double nb_pixels(const RenderSurface& surface);

double frame_size(double pixel_count, BitDepth depth, double dof_fraction, double factor);

// I/P (and B when the profile has a B factor) sizes for one surface.
FrameSizes frame_sizes(const RenderSurface& surface, const capacity::CompressionProfile& comp);

// round(gop_time * fps) - 1
std::int64_t p_frame_count(const GopConfig& cfg);

BitRate gop_bitrate(const FrameSizes& sizes, std::int64_t n_i, std::int64_t n_p, const GopConfig& cfg,
                    std::int64_t n_b = 0);

// nb_pixels -> frame sizes -> P count -> GOP bitrate. Strong-interaction
// streams are I+P only: B insertion is a ConfigError.
BitRate strong_interaction_bitrate(const RenderSurface& surface, const GopConfig& cfg,
                                   const capacity::CompressionProfile& comp);

}  // namespace xrreq::codec
