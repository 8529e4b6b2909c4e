#include "profilebench/camera.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace profilebench {

void Camera::validate() const {
  if (!(distance > near && near > 0.0)) {
    throw std::invalid_argument("Camera: requires distance > near > 0");
  }
  if (!(far > distance)) throw std::invalid_argument("Camera: requires far > distance");
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
    throw std::invalid_argument("Camera: fov_deg must lie in (0, 180)");
  }
  if (width < 1 || height < 1) throw std::invalid_argument("Camera: empty image plane");
}

double Camera::tan_half_fov() const { return std::tan(0.5 * deg_to_rad(fov_deg)); }

Projection project(const Camera& camera, const MatX3& points) {
  camera.validate();
  if (!points.allFinite()) throw std::invalid_argument("project: non-finite points");

  const long m = points.rows();
  Projection out;
  out.pixels.resize(m, 2);
  out.depth.resize(m);
  out.valid.assign(static_cast<std::size_t>(m), 0);

  const double tv = camera.tan_half_fov();
  const double th = tv * camera.aspect();
  for (long i = 0; i < m; ++i) {
    const double t = camera.distance - points(i, 2);
    out.depth[i] = t;
    if (t <= camera.near || t >= camera.far) {
      out.pixels(i, 0) = out.pixels(i, 1) = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double ndc_x = points(i, 0) / (t * th);
    const double ndc_y = points(i, 1) / (t * tv);
    out.pixels(i, 0) = (ndc_x + 1.0) * 0.5 * camera.width - 0.5;
    out.pixels(i, 1) = (1.0 - ndc_y) * 0.5 * camera.height - 0.5;
    out.valid[static_cast<std::size_t>(i)] = 1;
  }
  return out;
}

Vec3 unproject(const Camera& camera, const Vec2& pixel, double depth) {
  camera.validate();
  const double tv = camera.tan_half_fov();
  const double th = tv * camera.aspect();
  const double ndc_x = (pixel[0] + 0.5) * 2.0 / camera.width - 1.0;
  const double ndc_y = 1.0 - (pixel[1] + 0.5) * 2.0 / camera.height;
  return Vec3(ndc_x * depth * th, ndc_y * depth * tv, camera.distance - depth);
}

}  // namespace profilebench
