/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include "fisheye/camera.hpp"
#include "fisheye/frame.hpp"

#include <Eigen/Dense>

namespace fisheye {

/// Fronto-parallel textured plane under per-frame lateral translation.
///
/// For such a scene the inter-frame motion is an exact translation in the
/// perspective image domain, which makes rendered pairs a sharp oracle for the
/// equisolid estimator. texture_pitch is mm per texel at unit depth: the texel
/// size on the plane is texture_pitch * depth_mm.
struct PlanarScene {
  LumaFrame texture;
  double texture_pitch = 1.0;
  double depth_mm = 1000.0;
  double tx_mm = 0.0;  // plane translation per frame step
  double ty_mm = 0.0;
};

/// Renders one equisolid fisheye frame of the scene. Pixels at incident angles
/// >= 90 degrees (rays that never meet a frontal plane) are filled with 128.
/// Texture lookup is bilinear with edge replication.
LumaFrame render_equisolid(const PlanarScene& scene, const CameraModel& cam, int frame_index);

/// Perspective-domain translation per frame step, in sensor mm: (f/depth) * (tx, ty).
Eigen::Vector2d perspective_shift_mm(const PlanarScene& scene, const CameraModel& cam);

/// The same shift in integer-candidate units (pixel pitches in the perspective domain).
Eigen::Vector2d perspective_shift_steps(const PlanarScene& scene, const CameraModel& cam);

/// Plane translation that produces a perspective-domain shift of exactly
/// (steps_x, steps_y) candidate units for the given camera and depth.
void set_shift_in_steps(PlanarScene& scene, const CameraModel& cam, double steps_x,
                        double steps_y);

/// Deterministic smooth test texture: a mid-gray field modulated by products of
/// sinusoids (values within [33, 223]).
LumaFrame make_sine_texture(int width, int height);

}  // namespace fisheye
