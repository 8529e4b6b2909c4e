#include "profilebench/model.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace profilebench {

namespace {

std::string field_error(const std::string& field, long index, const std::string& what) {
  return "model asset invariant violation: " + field + "[" + std::to_string(index) + "] " + what;
}

}  // namespace

int ModelAsset::root_joint() const {
  for (int j = 0; j < joint_count(); ++j) {
    if (joint_parents[j] < 0) return j;
  }
  throw std::runtime_error("model asset has no root joint");
}

void ModelAsset::validate() const {
  const int n = vertex_count();
  const int j_count = joint_count();

  if (n < 3) throw std::runtime_error("model asset: fewer than 3 vertices");
  if (face_count() < 1) throw std::runtime_error("model asset: no faces");
  if (!template_vertices.allFinite()) throw std::runtime_error("model asset: non-finite template vertex");

  for (long f = 0; f < faces.rows(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int idx = faces(f, c);
      if (idx < 0 || idx >= n) {
        throw std::runtime_error(field_error("faces", f, "index " + std::to_string(idx) +
                                             " out of range [0," + std::to_string(n) + ")"));
      }
    }
  }

  for (std::size_t s = 0; s < shape_basis.size(); ++s) {
    if (shape_basis[s].rows() != n) {
      throw std::runtime_error(field_error("shape_basis", static_cast<long>(s),
                                           "row count does not match vertex count"));
    }
    if (!shape_basis[s].allFinite()) {
      throw std::runtime_error(field_error("shape_basis", static_cast<long>(s), "non-finite entry"));
    }
  }

  if (joint_regressor.rows() != j_count || joint_regressor.cols() != n) {
    throw std::runtime_error("model asset: joint_regressor shape mismatch");
  }
  if (skin_weights.rows() != n || skin_weights.cols() != j_count) {
    throw std::runtime_error("model asset: skin_weights shape mismatch");
  }
  for (long i = 0; i < skin_weights.rows(); ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < j_count; ++j) {
      const double w = skin_weights(i, j);
      if (w < -1e-9) throw std::runtime_error(field_error("skin_weights", i, "negative weight"));
      row_sum += w;
    }
    if (std::abs(row_sum - 1.0) > 1e-6) {
      throw std::runtime_error(field_error("skin_weights", i,
                                           "row sums to " + std::to_string(row_sum) + ", expected 1"));
    }
  }

  int roots = 0;
  for (int j = 0; j < j_count; ++j) {
    const int p = joint_parents[j];
    if (p < 0) {
      ++roots;
    } else if (p >= j_count) {
      throw std::runtime_error(field_error("joint_parents", j, "parent index out of range"));
    }
    // walk to the root; a cycle never terminates within j_count steps
    int cur = j;
    int steps = 0;
    while (joint_parents[cur] >= 0) {
      cur = joint_parents[cur];
      if (++steps > j_count) {
        throw std::runtime_error(field_error("joint_parents", j, "cycle detected"));
      }
    }
  }
  if (roots != 1) {
    throw std::runtime_error("model asset: expected exactly one root joint, found " +
                             std::to_string(roots));
  }

  for (std::size_t k = 0; k < landmarks.size(); ++k) {
    const LandmarkAnchor& lm = landmarks[k];
    if (lm.face < 0 || lm.face >= face_count()) {
      throw std::runtime_error(field_error("landmarks", static_cast<long>(k), "face index out of range"));
    }
    double sum = lm.bary.sum();
    if (lm.bary.minCoeff() < -1e-9 || std::abs(sum - 1.0) > 1e-6) {
      throw std::runtime_error(field_error("landmarks", static_cast<long>(k),
                                           "barycentric weights must be nonnegative and sum to 1"));
    }
  }

  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  for (std::size_t k = 0; k < jawline_indices.size(); ++k) {
    const int idx = jawline_indices[k];
    if (idx < 0 || idx >= n) {
      throw std::runtime_error(field_error("jawline_indices", static_cast<long>(k), "out of range"));
    }
    if (seen[static_cast<std::size_t>(idx)]++) {
      throw std::runtime_error(field_error("jawline_indices", static_cast<long>(k), "duplicate vertex"));
    }
  }
}

void PoseParams::check_finite() const {
  if (!global_rotation.allFinite()) throw std::runtime_error("pose: non-finite global rotation");
  if (global_rotation.norm() >= kPi + 1e-9) {
    throw std::runtime_error("pose: global rotation angle outside canonical range [0, pi)");
  }
  for (const Vec3& r : articulated_rotations) {
    if (!r.allFinite()) throw std::runtime_error("pose: non-finite articulated rotation");
    if (r.norm() >= kPi + 1e-9) {
      throw std::runtime_error("pose: articulated rotation angle outside canonical range [0, pi)");
    }
  }
}

Mat3 joint_local_rotation(const ModelAsset& asset, const PoseParams& theta, int joint) {
  const int root = asset.root_joint();
  if (joint == root) return rodrigues(theta.global_rotation);
  // articulated rotations are ordered by joint index, skipping the root
  int slot = 0;
  for (int j = 0; j < joint; ++j) {
    if (j != root) ++slot;
  }
  return rodrigues(theta.articulated_rotations.at(static_cast<std::size_t>(slot)));
}

PoseTransforms compute_pose_transforms(const ModelAsset& asset, const MatX3& shaped_vertices,
                                       const PoseParams& theta) {
  const int j_count = asset.joint_count();
  if (static_cast<int>(theta.articulated_rotations.size()) != j_count - 1) {
    throw std::runtime_error("pose: articulated rotation count does not match joint count");
  }
  theta.check_finite();

  PoseTransforms out;
  out.rest_joints = asset.joint_regressor * shaped_vertices;
  out.world_rotation.resize(static_cast<std::size_t>(j_count));
  out.world_translation.resize(static_cast<std::size_t>(j_count));

  // joint_parents is acyclic with parents stored at arbitrary indices; walk
  // in an order where parents come first
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(j_count));
  std::vector<std::uint8_t> placed(static_cast<std::size_t>(j_count), 0);
  while (static_cast<int>(order.size()) < j_count) {
    for (int j = 0; j < j_count; ++j) {
      if (placed[j]) continue;
      const int p = asset.joint_parents[j];
      if (p < 0 || placed[p]) {
        order.push_back(j);
        placed[j] = 1;
      }
    }
  }

  for (int j : order) {
    const Mat3 local = joint_local_rotation(asset, theta, j);
    const int p = asset.joint_parents[j];
    const Vec3 joint_pos = out.rest_joints.row(j).transpose();
    if (p < 0) {
      out.world_rotation[j] = local;
      out.world_translation[j] = joint_pos;
    } else {
      const Vec3 parent_pos = out.rest_joints.row(p).transpose();
      out.world_rotation[j] = out.world_rotation[p] * local;
      out.world_translation[j] =
          out.world_rotation[p] * (joint_pos - parent_pos) + out.world_translation[p];
    }
  }
  return out;
}

MatX3 shape_vertices(const ModelAsset& asset, const ShapeParams& beta) {
  if (beta.dim() != asset.shape_dim()) {
    throw std::runtime_error("decode: beta length " + std::to_string(beta.dim()) +
                             " does not match asset shape dim " + std::to_string(asset.shape_dim()));
  }
  if (!beta.beta.allFinite()) throw std::runtime_error("decode: non-finite shape parameters");
  MatX3 v = asset.template_vertices;
  for (int s = 0; s < asset.shape_dim(); ++s) {
    if (beta.beta[s] != 0.0) v += beta.beta[s] * asset.shape_basis[static_cast<std::size_t>(s)];
  }
  return v;
}

MatX3 pose_vertices(const ModelAsset& asset, const MatX3& shaped, const PoseTransforms& t) {
  const int n = static_cast<int>(shaped.rows());
  const int j_count = asset.joint_count();
  MatX3 out(n, 3);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const Vec3 v = shaped.row(i).transpose();
    Vec3 acc = Vec3::Zero();
    for (int j = 0; j < j_count; ++j) {
      const double w = asset.skin_weights(i, j);
      if (w == 0.0) continue;
      const Vec3 rest_joint = t.rest_joints.row(j).transpose();
      acc += w * (t.world_rotation[j] * (v - rest_joint) + t.world_translation[j]);
    }
    out.row(i) = acc.transpose();
  }
  return out;
}

LandmarkSet3D interpolate_landmarks(const ModelAsset& asset, const MatX3& vertices) {
  LandmarkSet3D out;
  const int k = asset.landmark_count();
  out.points.resize(k, 3);
  out.labels.reserve(static_cast<std::size_t>(k));
  out.contour_flags.reserve(static_cast<std::size_t>(k));
  for (int m = 0; m < k; ++m) {
    const LandmarkAnchor& lm = asset.landmarks[static_cast<std::size_t>(m)];
    Vec3 p = Vec3::Zero();
    for (int c = 0; c < 3; ++c) {
      p += lm.bary[c] * vertices.row(asset.faces(lm.face, c)).transpose();
    }
    out.points.row(m) = p.transpose();
    out.labels.push_back(lm.label);
    out.contour_flags.push_back(lm.contour ? 1 : 0);
  }
  return out;
}

DecodeResult decode(const ModelAsset& asset, const ShapeParams& beta, const PoseParams& theta) {
  const MatX3 shaped = shape_vertices(asset, beta);
  const PoseTransforms transforms = compute_pose_transforms(asset, shaped, theta);
  DecodeResult out;
  out.mesh.vertices = pose_vertices(asset, shaped, transforms);
  out.mesh.faces = asset.faces;
  out.landmarks = interpolate_landmarks(asset, out.mesh.vertices);
  return out;
}

CanonicalizeResult canonicalize_profile(const Mesh& mesh, double yaw) {
  if (!std::isfinite(yaw) || !mesh.vertices.allFinite()) {
    throw std::runtime_error("canonicalize_profile: non-finite input");
  }
  CanonicalizeResult out;
  if (yaw >= 0.0) {
    out.mesh = mesh;
    out.yaw = yaw;
    return out;
  }
  out.mesh.vertices = mesh.vertices;
  out.mesh.vertices.col(0) *= -1.0;
  out.mesh.faces.resize(mesh.faces.rows(), 3);
  for (long f = 0; f < mesh.faces.rows(); ++f) {
    // reversed winding keeps outward orientation under the reflection
    out.mesh.faces(f, 0) = mesh.faces(f, 0);
    out.mesh.faces(f, 1) = mesh.faces(f, 2);
    out.mesh.faces(f, 2) = mesh.faces(f, 1);
  }
  out.yaw = -yaw;
  out.flipped = true;
  return out;
}

}  // namespace profilebench
