/* SPDX-License-Identifier: Apache-2.0 */
#include "fisheye/synth.hpp"

#include <cmath>
#include <stdexcept>

namespace fisheye {

namespace {

void check_scene(const PlanarScene& scene) {
  if (scene.texture.empty()) throw std::invalid_argument("PlanarScene: texture is empty");
  if (!(scene.depth_mm > 0.0)) throw std::invalid_argument("PlanarScene: depth must be positive");
  if (!(scene.texture_pitch > 0.0))
    throw std::invalid_argument("PlanarScene: texture pitch must be positive");
}

double bilinear_at(const LumaFrame& tex, double u, double v) {
  const int w = tex.width();
  const int h = tex.height();
  const double uc = std::clamp(u, 0.0, static_cast<double>(w - 1));
  const double vc = std::clamp(v, 0.0, static_cast<double>(h - 1));
  const int c0 = std::min(static_cast<int>(std::floor(uc)), w - 1);
  const int r0 = std::min(static_cast<int>(std::floor(vc)), h - 1);
  const int c1 = std::min(c0 + 1, w - 1);
  const int r1 = std::min(r0 + 1, h - 1);
  const double fu = uc - c0;
  const double fv = vc - r0;
  const double top = (1.0 - fu) * tex.at(r0, c0) + fu * tex.at(r0, c1);
  const double bot = (1.0 - fu) * tex.at(r1, c0) + fu * tex.at(r1, c1);
  return (1.0 - fv) * top + fv * bot;
}

}  // namespace

LumaFrame render_equisolid(const PlanarScene& scene, const CameraModel& cam, int frame_index) {
  check_scene(scene);

  const double f = cam.focal_length_mm;
  const double invalid_radius = f * kSqrt2;  // theta >= 90 deg: ray never meets the plane
  const double shift_x = frame_index * scene.tx_mm;
  const double shift_y = frame_index * scene.ty_mm;
  const double texel_mm = scene.texture_pitch * scene.depth_mm;
  const double tex_cc = 0.5 * (scene.texture.width() - 1);
  const double tex_cr = 0.5 * (scene.texture.height() - 1);

  LumaFrame out(cam.image_width_px, cam.image_height_px);
  for (int row = 0; row < cam.image_height_px; ++row) {
    for (int col = 0; col < cam.image_width_px; ++col) {
      const SensorPoint s =
          pixel_to_sensor(PixelPos{static_cast<double>(col), static_cast<double>(row)}, cam);
      const double re = s.radius_mm();
      if (re >= invalid_radius) {
        out.at(row, col) = 128;
        continue;
      }
      // Invert the equisolid mapping to the incident angle and intersect the
      // viewing ray with the plane at the scene depth.
      const double theta = 2.0 * std::asin(re / (2.0 * f));
      const double rho = scene.depth_mm * std::tan(theta);
      const double plane_x = re > 0.0 ? s.x_mm / re * rho : 0.0;
      const double plane_y = re > 0.0 ? s.y_mm / re * rho : 0.0;
      const double u = (plane_x + shift_x) / texel_mm + tex_cc;
      const double v = (plane_y + shift_y) / texel_mm + tex_cr;
      out.at(row, col) = quantize_u8(bilinear_at(scene.texture, u, v));
    }
  }
  return out;
}

Eigen::Vector2d perspective_shift_mm(const PlanarScene& scene, const CameraModel& cam) {
  check_scene(scene);
  const double k = cam.focal_length_mm / scene.depth_mm;
  return {k * scene.tx_mm, k * scene.ty_mm};
}

Eigen::Vector2d perspective_shift_steps(const PlanarScene& scene, const CameraModel& cam) {
  const Eigen::Vector2d mm = perspective_shift_mm(scene, cam);
  return {mm.x() / cam.pitch_x(), mm.y() / cam.pitch_y()};
}

void set_shift_in_steps(PlanarScene& scene, const CameraModel& cam, double steps_x,
                        double steps_y) {
  const double k = scene.depth_mm / cam.focal_length_mm;
  scene.tx_mm = steps_x * cam.pitch_x() * k;
  scene.ty_mm = steps_y * cam.pitch_y() * k;
}

LumaFrame make_sine_texture(int width, int height) {
  LumaFrame tex(width, height);
  constexpr double two_pi = 2.0 * kPi;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double v = 128.0 + 55.0 * std::sin(two_pi * c / 23.0) * std::cos(two_pi * r / 29.0) +
                       40.0 * std::sin(two_pi * (c + r) / 47.0);
      tex.at(r, c) = quantize_u8(v);
    }
  }
  return tex;
}

}  // namespace fisheye
