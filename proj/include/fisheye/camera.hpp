/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include "fisheye/projection.hpp"

#include <cmath>
#include <stdexcept>

namespace fisheye {

/// Equisolid fisheye camera: focal length, sensor geometry and pixel grid.
/// Pixel pitch is derived from sensor size and resolution, never stored.
struct CameraModel {
  double focal_length_mm = 0.0;
  double sensor_width_mm = 0.0;
  double sensor_height_mm = 0.0;
  int image_width_px = 0;
  int image_height_px = 0;
  double fov_deg = 0.0;

  CameraModel(double f_mm, double sw_mm, double sh_mm, int w_px, int h_px, double fov_degrees)
      : focal_length_mm(f_mm),
        sensor_width_mm(sw_mm),
        sensor_height_mm(sh_mm),
        image_width_px(w_px),
        image_height_px(h_px),
        fov_deg(fov_degrees) {
    if (!(focal_length_mm > 0.0))
      throw std::invalid_argument("CameraModel: focal length must be positive");
    if (!(sensor_width_mm > 0.0) || !(sensor_height_mm > 0.0))
      throw std::invalid_argument("CameraModel: sensor dimensions must be positive");
    if (image_width_px < 1 || image_height_px < 1)
      throw std::invalid_argument("CameraModel: image dimensions must be >= 1");
    if (!(fov_deg > 0.0) || fov_deg > 360.0)
      throw std::invalid_argument("CameraModel: field of view must be in (0, 360] degrees");
    // The image circle at the FOV edge must fit on the sensor.
    const double edge = equisolid_radius(deg_to_rad(0.5 * fov_deg), focal_length_mm);
    const double half_diag =
        0.5 * std::sqrt(sensor_width_mm * sensor_width_mm + sensor_height_mm * sensor_height_mm);
    if (edge > half_diag + 1e-9)
      throw std::invalid_argument("CameraModel: image circle exceeds the sensor diagonal");
  }

  double pitch_x() const { return sensor_width_mm / image_width_px; }
  double pitch_y() const { return sensor_height_mm / image_height_px; }

  // Circular fisheye: 5.2 mm square sensor that just contains the 185-degree image circle.
  static CameraModel circular(int w_px, int h_px) {
    return CameraModel(1.8, 5.2, 5.2, w_px, h_px, 185.0);
  }
  // Full-frame fisheye: 4.6 x 2.9 mm sensor cropping the image circle.
  static CameraModel fullframe(int w_px, int h_px) {
    return CameraModel(1.8, 4.6, 2.9, w_px, h_px, 185.0);
  }
};

inline bool operator==(const CameraModel& a, const CameraModel& b) {
  return a.focal_length_mm == b.focal_length_mm && a.sensor_width_mm == b.sensor_width_mm &&
         a.sensor_height_mm == b.sensor_height_mm && a.image_width_px == b.image_width_px &&
         a.image_height_px == b.image_height_px && a.fov_deg == b.fov_deg;
}

// Pixel-center convention: the image center sits at ((W-1)/2, (H-1)/2).
inline SensorPoint pixel_to_sensor(PixelPos p, const CameraModel& cam) {
  return SensorPoint{(p.col - 0.5 * (cam.image_width_px - 1)) * cam.pitch_x(),
                     (p.row - 0.5 * (cam.image_height_px - 1)) * cam.pitch_y()};
}

inline PixelPos sensor_to_pixel(SensorPoint s, const CameraModel& cam) {
  return PixelPos{s.x_mm / cam.pitch_x() + 0.5 * (cam.image_width_px - 1),
                  s.y_mm / cam.pitch_y() + 0.5 * (cam.image_height_px - 1)};
}

}  // namespace fisheye
