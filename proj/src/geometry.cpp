#include "xrreq/geometry.hpp"

#include <cmath>

#include <fmt/format.h>

#include "xrreq/errors.hpp"

namespace xrreq::geometry {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw DomainError(fmt::format("{} must be positive (got {})", what, v));
}

void require_fov(Angle a, double max_deg, const char* what) {
  if (!(a.degrees >= 0.0 && a.degrees <= max_deg)) {
    throw DomainError(fmt::format("{} must lie in [0, {}] degrees (got {})", what, max_deg, a.degrees));
  }
}

}  // namespace

void DisplaySpec::validate() const {
  require_positive(refresh_hz, "refresh rate");
  if (per_eye.width < 1 || per_eye.height < 1) throw DomainError("resolution must be at least 1x1");
  const bool has_physical = physical.has_value() && distance_in.has_value();
  if (!has_physical && !fov.has_value()) {
    throw DomainError("display needs either physical size and viewing distance, or a field of view");
  }
  if (fov) {
    require_fov(fov->horizontal, 360.0, "horizontal fov");
    require_fov(fov->vertical, 180.0, "vertical fov");
    require_fov(fov->extra_h, 360.0, "horizontal margin");
    require_fov(fov->extra_v, 180.0, "vertical margin");
  }
}

FovSpec DisplaySpec::effective_fov() const {
  validate();
  if (fov) return *fov;
  return FovSpec{fov_from_physical(physical->width_in, *distance_in),
                 fov_from_physical(physical->height_in, *distance_in), Angle{}, Angle{}};
}

double ppi(const Resolution& res, const PhysicalSize& size) {
  require_positive(size.width_in, "physical width");
  require_positive(size.height_in, "physical height");
  const double diag_px = std::hypot(static_cast<double>(res.width), static_cast<double>(res.height));
  return diag_px / std::hypot(size.width_in, size.height_in);
}

double ppi_from_diagonal(const Resolution& res, double diagonal_in) {
  require_positive(diagonal_in, "diagonal");
  return std::hypot(static_cast<double>(res.width), static_cast<double>(res.height)) / diagonal_in;
}

Angle fov_from_physical(double extent_in, double distance_in) {
  require_positive(extent_in, "extent");
  require_positive(distance_in, "viewing distance");
  return Angle::from_radians(2.0 * std::atan(0.5 * extent_in / distance_in));
}

double ppd_from_fov(std::int64_t pixels, Angle fov) {
  if (pixels < 0) throw DomainError("pixel count must be non-negative");
  require_positive(fov.degrees, "field of view");
  return static_cast<double>(pixels) / fov.degrees;
}

double ppd_from_physical(std::int64_t pixels, double extent_in, double distance_in) {
  return ppd_from_fov(pixels, fov_from_physical(extent_in, distance_in));
}

std::int64_t scale_resolution(std::int64_t viewport_px, Angle viewport_fov, Angle target_fov) {
  if (viewport_px < 0) throw DomainError("pixel count must be non-negative");
  require_positive(viewport_fov.degrees, "viewport field of view");
  require_fov(target_fov, 360.0, "target field of view");
  return std::llround(static_cast<double>(viewport_px) * target_fov.degrees / viewport_fov.degrees);
}

Resolution full_sphere_resolution(const Resolution& viewport, Angle fov_h, Angle fov_v) {
  return Resolution{scale_resolution(viewport.width, fov_h, Angle{360.0}),
                    scale_resolution(viewport.height, fov_v, Angle{180.0})};
}

double ppd_from_cone_density(double cones_per_mm2, double lens_to_fovea_mm) {
  require_positive(cones_per_mm2, "cone density");
  require_positive(lens_to_fovea_mm, "lens-to-fovea distance");
  const double pitch_mm = 1.0 / std::sqrt(cones_per_mm2);
  const Angle per_cone = Angle::from_radians(2.0 * std::atan(0.5 * pitch_mm / lens_to_fovea_mm));
  return 1.0 / per_cone.degrees;
}

}  // namespace xrreq::geometry
