#include "profilebench/align.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace profilebench {

MatX3 RigidTransform::apply(const MatX3& points) const {
  MatX3 out(points.rows(), 3);
  for (long i = 0; i < points.rows(); ++i) {
    out.row(i) = (scale * (rotation * points.row(i).transpose()) + translation).transpose();
  }
  return out;
}

void RigidTransform::validate() const {
  if ((rotation.transpose() * rotation - Mat3::Identity()).norm() > 1e-9) {
    throw std::logic_error("RigidTransform: rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > 1e-9) {
    throw std::logic_error("RigidTransform: rotation determinant is not +1");
  }
  if (!(scale > 0.0)) throw std::logic_error("RigidTransform: scale must be positive");
}

RigidTransform umeyama_align(const MatX3& src, const MatX3& dst,
                             const std::vector<int>& subset, bool with_scale) {
  if (src.rows() != dst.rows()) {
    throw std::invalid_argument("umeyama_align: point counts differ");
  }
  std::vector<int> idx = subset;
  if (idx.empty()) {
    idx.resize(static_cast<std::size_t>(src.rows()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  }
  const auto m = static_cast<double>(idx.size());
  if (idx.size() < 3) {
    throw std::invalid_argument("umeyama_align: need at least 3 correspondences");
  }
  for (int i : idx) {
    if (i < 0 || i >= src.rows()) throw std::out_of_range("umeyama_align: subset index");
  }

  Vec3 mu_x = Vec3::Zero(), mu_y = Vec3::Zero();
  for (int i : idx) {
    mu_x += src.row(i).transpose();
    mu_y += dst.row(i).transpose();
  }
  mu_x /= m;
  mu_y /= m;

  Mat3 cov = Mat3::Zero();
  double var_x = 0.0;
  for (int i : idx) {
    const Vec3 x = src.row(i).transpose() - mu_x;
    const Vec3 y = dst.row(i).transpose() - mu_y;
    cov += y * x.transpose();
    var_x += x.squaredNorm();
  }
  cov /= m;
  var_x /= m;

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 d = svd.singularValues();
  // Rank below 2 (collinear or coincident points) leaves the rotation
  // underdetermined.
  if (d[1] <= 1e-12 * std::max(1.0, d[0])) {
    throw std::invalid_argument("umeyama_align: degenerate point configuration");
  }

  Vec3 s_fix = Vec3::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) s_fix[2] = -1.0;

  RigidTransform out;
  out.rotation = svd.matrixU() * s_fix.asDiagonal() * svd.matrixV().transpose();
  if (with_scale) {
    if (var_x <= 0.0) throw std::invalid_argument("umeyama_align: zero source variance");
    out.scale = d.dot(s_fix) / var_x;
  }
  out.translation = mu_y - out.scale * (out.rotation * mu_x);
  return out;
}

}  // namespace profilebench
