#include "profilebench/geometry.hpp"

#include <cmath>

namespace profilebench {

Mat3 rodrigues(const Vec3& axis_angle) {
  const double theta2 = axis_angle.squaredNorm();
  const Mat3 k = skew(axis_angle);
  if (theta2 < 1e-16) {
    // R = I + K + K^2/2, truncation error O(theta^3)
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  const double theta = std::sqrt(theta2);
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / theta2;
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 rotation_log(const Mat3& r) {
  const double trace = r.trace();
  const double cos_theta = std::min(1.0, std::max(-1.0, (trace - 1.0) * 0.5));
  const double theta = std::acos(cos_theta);
  Vec3 w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (theta < 1e-8) {
    return 0.5 * w;  // first-order: R ~ I + skew(aa)
  }
  if (theta > kPi - 1e-6) {
    // Near pi the off-diagonal difference vanishes; recover the axis from
    // the symmetric part B = (R + I)/2 = aa^T for theta == pi.
    Mat3 b = 0.5 * (r + Mat3::Identity());
    int i = 0;
    if (b(1, 1) > b(i, i)) i = 1;
    if (b(2, 2) > b(i, i)) i = 2;
    Vec3 axis = b.col(i) / std::sqrt(std::max(b(i, i), 1e-12));
    axis.normalize();
    // Fix the sign using the anti-symmetric part when it is not fully zero.
    if (axis.dot(w) < 0) axis = -axis;
    return theta * axis;
  }
  return (theta / (2.0 * std::sin(theta))) * w;
}

std::array<Mat3, 3> rodrigues_jacobian(const Vec3& axis_angle) {
  std::array<Mat3, 3> jac;
  const double theta2 = axis_angle.squaredNorm();
  if (theta2 < 1e-14) {
    // d/da_i [I + K + K^2/2] = E_i + (E_i K + K E_i)/2, error O(theta^2)
    const Mat3 k = skew(axis_angle);
    for (int i = 0; i < 3; ++i) {
      Mat3 e = skew(Vec3::Unit(i));
      jac[i] = e + 0.5 * (e * k + k * e);
    }
    return jac;
  }
  // Gallego & Yezzi closed form:
  // dR/da_i = (a_i [a]x + [a x (I - R) e_i]x) / theta^2 * R
  const Mat3 r = rodrigues(axis_angle);
  const Mat3 k = skew(axis_angle);
  const Mat3 i_minus_r = Mat3::Identity() - r;
  for (int i = 0; i < 3; ++i) {
    const Vec3 v = axis_angle.cross(i_minus_r * Vec3::Unit(i));
    jac[i] = ((axis_angle[i] * k + skew(v)) / theta2) * r;
  }
  return jac;
}

Mat3 rotation_about_y(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

}  // namespace profilebench
