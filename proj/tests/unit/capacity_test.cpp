#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "xrreq/capacity.hpp"
#include "xrreq/errors.hpp"
#include "xrreq/units.hpp"

using namespace xrreq;
using namespace xrreq::capacity;

namespace {

FovSpec fov(double h, double v) { return FovSpec{Angle{h}, Angle{v}, {}, {}}; }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Capacity, EyeLikeChain) {
  EXPECT_EQ(eye_like_pixels_per_eye(fov(155, 130), 200.0), 806'000'000.0);
  const auto raw = eye_like_capacity(fov(155, 130), 200.0, BitDepth{24}, 77.0, CompressionProfile::raw());
  EXPECT_LT(rel(in_units(raw, kTi), 2.71), 0.005);
  const auto c600 = eye_like_capacity(fov(155, 130), 200.0, BitDepth{24}, 77.0, CompressionProfile::overall(600));
  EXPECT_EQ(format_bitrate(c600, PrefixMode::kBinary), "4.62 Gibps");
}

TEST(Capacity, FullSphereChain) {
  const auto raw = full_sphere_capacity(200.0, BitDepth{24}, 77.0, CompressionProfile::raw());
  EXPECT_LT(rel(in_units(raw, kTi), 4.36), 0.005);
  EXPECT_LT(rel(in_units(full_sphere_capacity(200.0, BitDepth{24}, 77.0, CompressionProfile::overall(600)), kGi), 7.44),
            0.005);
  EXPECT_LT(rel(in_units(full_sphere_capacity(200.0, BitDepth{24}, 77.0, CompressionProfile::overall(1200)), kGi), 3.72),
            0.005);
}

TEST(Capacity, HmdQuestRows) {
  const auto comp = CompressionProfile::overall(600);
  EXPECT_NEAR(in_units(hmd_capacity({1824, 1840}, BitDepth{24}, 72, comp, true), kMi), 18.44, 0.01);
  EXPECT_NEAR(in_units(hmd_capacity({6116, 3056}, BitDepth{24}, 120, comp, false), kMi), 85.56, 0.01);
}

TEST(Capacity, Volumetric) {
  VoxelSpec v;
  v.voxels_per_frame = 50360;
  EXPECT_EQ(v.bits_per_voxel(), 72);
  EXPECT_NEAR(in_units(volumetric_capacity(v, 30, CompressionProfile::raw()), kMi), 103.74, 0.01);
  EXPECT_NEAR(in_units(volumetric_capacity(v, 90, CompressionProfile::raw()), kMi), 311.22, 0.01);
}

TEST(Capacity, CompressionValidation) {
  EXPECT_THROW(CompressionProfile::overall(0.5), DomainError);
  CompressionProfile p;
  p.iframe_factor = 200;
  p.pframe_factor = 100;
  EXPECT_THROW(p.validate(), DomainError);
  EXPECT_THROW(hmd_capacity({10, 10}, BitDepth{0}, 60, CompressionProfile::raw(), true), DomainError);
  EXPECT_THROW(hmd_capacity({10, 10}, BitDepth{24}, -1, CompressionProfile::raw(), true), DomainError);
}

TEST(CapacityProperty, LinearInFpsAndDepthInverseInFactor) {
  for (int i = 0; i < oracle::kPropertyCases; ++i) {
    const Resolution r{oracle::uniform_int(1, 8000), oracle::uniform_int(1, 8000)};
    const int bpp = static_cast<int>(oracle::uniform_int(1, 32));
    const double fps = oracle::uniform(1.0, 240.0);
    const double f = oracle::uniform(1.0, 1000.0);
    const auto base = hmd_capacity(r, BitDepth{bpp}, fps, CompressionProfile::overall(f), true).bits_per_second;
    const auto fps2 = hmd_capacity(r, BitDepth{bpp}, 2 * fps, CompressionProfile::overall(f), true).bits_per_second;
    const auto bpp2 = hmd_capacity(r, BitDepth{2 * bpp}, fps, CompressionProfile::overall(f), true).bits_per_second;
    const auto f2 = hmd_capacity(r, BitDepth{bpp}, fps, CompressionProfile::overall(2 * f), true).bits_per_second;
    EXPECT_DOUBLE_EQ(fps2, 2 * base);
    EXPECT_DOUBLE_EQ(bpp2, 2 * base);
    EXPECT_DOUBLE_EQ(f2, base / 2);

    const double ppd = oracle::uniform(1.0, 100.0);
    const auto fv = fov(oracle::uniform(1.0, 180.0), oracle::uniform(1.0, 180.0));
    const auto e = eye_like_capacity(fv, ppd, BitDepth{bpp}, fps, CompressionProfile::overall(f)).bits_per_second;
    EXPECT_DOUBLE_EQ(eye_like_capacity(fv, ppd, BitDepth{bpp}, 3 * fps, CompressionProfile::overall(f)).bits_per_second,
                     3 * e);
    EXPECT_DOUBLE_EQ(eye_like_capacity(fv, ppd, BitDepth{bpp}, fps, CompressionProfile::overall(4 * f)).bits_per_second,
                     e / 4);
    const auto s = full_sphere_capacity(ppd, BitDepth{bpp}, fps, CompressionProfile::overall(f)).bits_per_second;
    EXPECT_DOUBLE_EQ(full_sphere_capacity(ppd, BitDepth{bpp}, 2 * fps, CompressionProfile::overall(f)).bits_per_second,
                     2 * s);
  }
}

TEST(CapacityProperty, StereoIsTwiceMono) {
  for (int i = 0; i < oracle::kPropertyCases; ++i) {
    const Resolution r{oracle::uniform_int(1, 8000), oracle::uniform_int(1, 8000)};
    const double fps = oracle::uniform(1.0, 240.0);
    const auto comp = CompressionProfile::overall(oracle::uniform(1.0, 1000.0));
    EXPECT_EQ(hmd_capacity(r, BitDepth{24}, fps, comp, true).bits_per_second,
              2 * hmd_capacity(r, BitDepth{24}, fps, comp, false).bits_per_second);
  }
}

TEST(CapacityProperty, EyeLikeMatchesHmdOnIntegralProducts) {
  for (int i = 0; i < oracle::kPropertyCases; ++i) {
    const double h = static_cast<double>(oracle::uniform_int(10, 180));
    const double v = static_cast<double>(oracle::uniform_int(10, 180));
    const double ppd = static_cast<double>(oracle::uniform_int(1, 120));
    const double fps = static_cast<double>(oracle::uniform_int(1, 240));
    const auto comp = CompressionProfile::overall(static_cast<double>(oracle::uniform_int(1, 1000)));
    const Resolution r{static_cast<std::int64_t>(h * ppd), static_cast<std::int64_t>(v * ppd)};
    EXPECT_DOUBLE_EQ(eye_like_capacity(fov(h, v), ppd, BitDepth{24}, fps, comp).bits_per_second,
                     hmd_capacity(r, BitDepth{24}, fps, comp, true).bits_per_second);
  }
}

TEST(CapacityProperty, VolumetricDegeneratesToMonoHmd) {
  for (int i = 0; i < oracle::kPropertyCases; ++i) {
    const int bpp = static_cast<int>(oracle::uniform_int(1, 64));
    VoxelSpec v;
    v.color_depth = bpp;
    v.position_depth = 0;
    v.voxels_per_frame = oracle::uniform_int(0, 1'000'000);
    const double fps = oracle::uniform(1.0, 120.0);
    const auto comp = CompressionProfile::overall(oracle::uniform(1.0, 100.0));
    EXPECT_DOUBLE_EQ(volumetric_capacity(v, fps, comp).bits_per_second,
                     hmd_capacity({v.voxels_per_frame, 1}, BitDepth{bpp}, fps, comp, false).bits_per_second);
  }
}

TEST(CapacityProperty, ZeroIffAMultiplicativeInputIsZero) {
  for (int i = 0; i < oracle::kPropertyCases; ++i) {
    const Resolution r{oracle::uniform_int(0, 3), oracle::uniform_int(0, 3)};
    const double fps = static_cast<double>(oracle::uniform_int(0, 2));
    const double out = hmd_capacity(r, BitDepth{24}, fps, CompressionProfile::raw(), true).bits_per_second;
    EXPECT_GE(out, 0.0);
    EXPECT_EQ(out == 0.0, r.width == 0 || r.height == 0 || fps == 0.0);
  }
}
