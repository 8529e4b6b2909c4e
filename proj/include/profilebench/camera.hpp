#pragma once

#include <vector>

#include "profilebench/defaults.hpp"
#include "profilebench/geometry.hpp"

namespace profilebench {

// Fixed pinhole camera at (0, 0, distance) looking toward the origin, y up,
// right-handed, vertical field of view. Camera space shares the world axes
// (the view direction is -z), so depth of a world point is distance - z.
struct Camera {
  double distance = defaults::kCameraDistance;
  double fov_deg = defaults::kCameraFovDeg;
  int width = defaults::kRenderResolution;
  int height = defaults::kRenderResolution;
  double near = defaults::kCameraNear;
  double far = defaults::kCameraFar;

  void validate() const;
  double tan_half_fov() const;
  double aspect() const { return static_cast<double>(width) / height; }

  Camera with_resolution(int res) const {
    Camera c = *this;
    c.width = res;
    c.height = res;
    return c;
  }
};

struct Projection {
  Eigen::MatrixX2d pixels;      // (0,0) at the top-left pixel center
  Eigen::VectorXd depth;        // camera-space depth, positive in front
  std::vector<std::uint8_t> valid;  // false when depth <= near or >= far
};

Projection project(const Camera& camera, const MatX3& points);

// Inverse of project for a pixel with known depth.
Vec3 unproject(const Camera& camera, const Vec2& pixel, double depth);

}  // namespace profilebench
