/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace fisheye {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt2 = std::numbers::sqrt2;

inline constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

/// Point on the sensor plane, millimeters, origin at the optical axis.
struct SensorPoint {
  double x_mm = 0.0;
  double y_mm = 0.0;

  double radius_mm() const { return std::sqrt(x_mm * x_mm + y_mm * y_mm); }
  double azimuth_rad() const { return std::atan2(y_mm, x_mm); }
};

/// Fractional pixel position, origin at the top-left pixel center.
struct PixelPos {
  double col = 0.0;
  double row = 0.0;
};

/// Equisolid angle projection: r_e = 2 f sin(theta/2).
/// Valid for incident angles up to 180 degrees (theta in [0, pi]).
inline double equisolid_radius(double theta_rad, double focal_mm) {
  if (!(focal_mm > 0.0))
    throw std::domain_error("equisolid_radius: focal length must be positive");
  if (!(theta_rad >= 0.0 && theta_rad <= kPi))
    throw std::domain_error("equisolid_radius: theta outside [0, pi]");
  return 2.0 * focal_mm * std::sin(0.5 * theta_rad);
}

/// Pinhole projection: r_p = f tan(theta). The tangent restricts theta to below 90 degrees.
inline double perspective_radius(double theta_rad, double focal_mm) {
  if (!(focal_mm > 0.0))
    throw std::domain_error("perspective_radius: focal length must be positive");
  if (!(theta_rad >= 0.0 && theta_rad < 0.5 * kPi))
    throw std::domain_error("perspective_radius: theta outside [0, pi/2)");
  return focal_mm * std::tan(theta_rad);
}

/// Incident angle of an equisolid radius: theta = 2 asin(r_e / 2f). Inverse of equisolid_radius.
inline double equisolid_angle(double re_mm, double focal_mm) {
  if (!(focal_mm > 0.0))
    throw std::domain_error("equisolid_angle: focal length must be positive");
  if (!(re_mm >= 0.0 && re_mm <= 2.0 * focal_mm))
    throw std::domain_error("equisolid_angle: radius outside [0, 2f]");
  return 2.0 * std::asin(re_mm / (2.0 * focal_mm));
}

/// Equisolid-to-perspective radius map: r_p = f tan(2 asin(r_e / 2f)).
///
/// Returns nullopt (domain exceeded) for r_e >= f*sqrt(2), i.e. theta >= 90 degrees,
/// where the target perspective domain has no finite radius. Callers use this to mark
/// pixels as un-projectable; on a 185-degree fisheye such pixels are expected content.
inline std::optional<double> equisolid_to_perspective(double re_mm, double focal_mm) {
  if (!(focal_mm > 0.0))
    throw std::domain_error("equisolid_to_perspective: focal length must be positive");
  if (!(re_mm >= 0.0))
    throw std::domain_error("equisolid_to_perspective: radius must be nonnegative");
  if (re_mm >= focal_mm * kSqrt2) return std::nullopt;
  return focal_mm * std::tan(2.0 * std::asin(re_mm / (2.0 * focal_mm)));
}

/// Perspective-to-equisolid radius map: r_e = 2 f sin(atan(r_p / f) / 2).
/// Total on r_p >= 0; the output is bounded above by f*sqrt(2).
inline double perspective_to_equisolid(double rp_mm, double focal_mm) {
  if (!(focal_mm > 0.0))
    throw std::domain_error("perspective_to_equisolid: focal length must be positive");
  if (!(rp_mm >= 0.0))
    throw std::domain_error("perspective_to_equisolid: radius must be nonnegative");
  return 2.0 * focal_mm * std::sin(0.5 * std::atan(rp_mm / focal_mm));
}

/// 2D equisolid-to-perspective map: the radial map applied along the point's
/// direction, azimuth preserved. nullopt when the radius map exceeds its domain.
inline std::optional<SensorPoint> backproject_point(SensorPoint p, double focal_mm) {
  const double r = p.radius_mm();
  if (r == 0.0) return SensorPoint{0.0, 0.0};
  const std::optional<double> rp = equisolid_to_perspective(r, focal_mm);
  if (!rp) return std::nullopt;
  const double s = *rp / r;
  return SensorPoint{p.x_mm * s, p.y_mm * s};
}

/// 2D perspective-to-equisolid map, azimuth preserved. Total.
inline SensorPoint reproject_point(SensorPoint p, double focal_mm) {
  const double r = p.radius_mm();
  if (r == 0.0) return SensorPoint{0.0, 0.0};
  const double s = perspective_to_equisolid(r, focal_mm) / r;
  return SensorPoint{p.x_mm * s, p.y_mm * s};
}

}  // namespace fisheye
