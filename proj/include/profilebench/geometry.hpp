#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <array>

namespace profilebench {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using MatX3 = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using FacesX3 = Eigen::Matrix<int, Eigen::Dynamic, 3>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

/// Axis-angle to rotation matrix. Switches to the quadratic series below
/// angle 1e-8 where the sin(t)/t and (1-cos t)/t^2 factors lose precision.
Mat3 rodrigues(const Vec3& axis_angle);

/// Rotation matrix to canonical axis-angle (angle in [0, pi]).
Vec3 rotation_log(const Mat3& rotation);

/// Partial derivatives of rodrigues(a) w.r.t. the three components of a.
std::array<Mat3, 3> rodrigues_jacobian(const Vec3& axis_angle);

/// Rotation by `angle` about +y (the model's vertical axis).
Mat3 rotation_about_y(double angle);

}  // namespace profilebench
