#pragma once

#include <cstdint>
#include <optional>

#include "xrreq/types.hpp"

// Display-quality geometry: pixel density, field of view and angular
// resolution. All functions are pure and throw DomainError on inputs
// outside their domain.
namespace xrreq::geometry {

// Physical description of a panel or render target.
struct DisplaySpec {
  Resolution per_eye;
  std::optional<PhysicalSize> physical;
  std::optional<double> distance_in;
  double refresh_hz = 60.0;
  std::optional<FovSpec> fov;

  // Either physical+distance or an explicit fov must be present.
  void validate() const;
  // The explicit fov, or one derived from the panel size and distance.
  FovSpec effective_fov() const;
};

// Diagonal pixels over diagonal inches.
double ppi(const Resolution& res, const PhysicalSize& size);
double ppi_from_diagonal(const Resolution& res, double diagonal_in);

// Angle subtended by a flat extent viewed head-on from `distance_in`.
Angle fov_from_physical(double extent_in, double distance_in);

double ppd_from_fov(std::int64_t pixels, Angle fov);

// Composition of ppd_from_fov and fov_from_physical.
double ppd_from_physical(std::int64_t pixels, double extent_in, double distance_in);

// Pixels needed across `target_fov` to keep the angular density a viewport
// of `viewport_px` over `viewport_fov` has. Rounded to nearest.
std::int64_t scale_resolution(std::int64_t viewport_px, Angle viewport_fov, Angle target_fov);

// Full 360x180 raster matching the per-eye viewport density.
Resolution full_sphere_resolution(const Resolution& viewport, Angle fov_h, Angle fov_v);

// Angular resolution of a retina treated as a pixel grid: one cone per
// pixel, cones packed on a square lattice of the given areal density,
// projected through the lens at `lens_to_fovea_mm`.
double ppd_from_cone_density(double cones_per_mm2, double lens_to_fovea_mm);

// Per-eye horizontal FoV of an HMD given its binocular FoV and the
// overlap between the eyes: each eye sees the overlap plus half of the
// monocular remainder. Not used by any model; kept for profile authors.
constexpr Angle per_eye_fov_from_binocular(Angle binocular, Angle overlap) {
  return Angle{binocular.degrees - (binocular.degrees - overlap.degrees) / 2.0};
}

}  // namespace xrreq::geometry
