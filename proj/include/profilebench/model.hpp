#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "profilebench/geometry.hpp"

namespace profilebench {

/// One landmark anchored to a mesh face by barycentric weights.
struct LandmarkAnchor {
  int face = 0;
  Vec3 bary = Vec3::Zero();
  std::string label;
  bool contour = false;
};

struct Mesh {
  MatX3 vertices;  // N x 3
  FacesX3 faces;   // F x 3, indices into vertices

  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  int face_count() const { return static_cast<int>(faces.rows()); }
};

struct LandmarkSet3D {
  MatX3 points;  // K x 3
  std::vector<std::string> labels;
  std::vector<std::uint8_t> contour_flags;

  int count() const { return static_cast<int>(points.rows()); }
};

/// Linear-blendshape articulated head model: template + shape basis,
/// regressed joints, linear blend skinning, barycentric landmark embedding
/// and the fixed chin-to-ear jawline vertex band.
struct ModelAsset {
  std::string name;
  std::string version;

  MatX3 template_vertices;             // N x 3
  FacesX3 faces;                       // F x 3
  std::vector<MatX3> shape_basis;      // S entries, each N x 3
  Eigen::MatrixXd joint_regressor;     // J x N
  std::vector<int> joint_parents;      // J entries, root = -1
  Eigen::MatrixXd skin_weights;        // N x J, rows sum to 1
  std::vector<LandmarkAnchor> landmarks;
  std::vector<int> jawline_indices;    // ordered, unique

  int vertex_count() const { return static_cast<int>(template_vertices.rows()); }
  int face_count() const { return static_cast<int>(faces.rows()); }
  int shape_dim() const { return static_cast<int>(shape_basis.size()); }
  int joint_count() const { return static_cast<int>(joint_parents.size()); }
  int landmark_count() const { return static_cast<int>(landmarks.size()); }

  /// Index of the unique root joint (parent == -1).
  int root_joint() const;

  /// Checks every structural invariant; throws std::runtime_error naming the
  /// offending field and index on the first violation.
  void validate() const;

  /// Content hash over all arrays and metadata (FNV-1a 64, hex string).
  /// Used to tie manifests to the asset they were generated from.
  std::string content_hash() const;
};

struct ShapeParams {
  Eigen::VectorXd beta;

  ShapeParams() = default;
  explicit ShapeParams(Eigen::VectorXd b) : beta(std::move(b)) {}
  static ShapeParams zeros(int dim) { return ShapeParams(Eigen::VectorXd::Zero(dim)); }
  int dim() const { return static_cast<int>(beta.size()); }
};

struct PoseParams {
  Vec3 global_rotation = Vec3::Zero();        // axis-angle, radians
  std::vector<Vec3> articulated_rotations;    // one per non-root joint

  static PoseParams zeros(int joint_count) {
    PoseParams p;
    p.articulated_rotations.assign(std::max(0, joint_count - 1), Vec3::Zero());
    return p;
  }
  /// Total scalar count: 3 (global) + 3 per articulated joint.
  int dim() const { return 3 + 3 * static_cast<int>(articulated_rotations.size()); }
  void check_finite() const;
};

struct DecodeResult {
  Mesh mesh;
  LandmarkSet3D landmarks;
};

/// World transform of every joint under a pose, plus the shaped joints it was
/// built from. Kept public so the supervision Jacobians can reuse it.
struct PoseTransforms {
  std::vector<Mat3> world_rotation;   // J
  std::vector<Vec3> world_translation;  // J, transform is x -> W(x - j) + t
  MatX3 rest_joints;                  // J x 3, regressed from shaped vertices
};

/// Rotation of joint j under the pose (root gets global_rotation).
Mat3 joint_local_rotation(const ModelAsset& asset, const PoseParams& theta, int joint);

/// Composes per-joint transforms along the parent chain.
PoseTransforms compute_pose_transforms(const ModelAsset& asset, const MatX3& shaped_vertices,
                                       const PoseParams& theta);

/// Template plus the linear shape offsets (no pose applied).
MatX3 shape_vertices(const ModelAsset& asset, const ShapeParams& beta);

/// Applies linear blend skinning to shaped vertices.
MatX3 pose_vertices(const ModelAsset& asset, const MatX3& shaped_vertices,
                    const PoseTransforms& transforms);

/// Barycentric interpolation of the asset's landmark embedding on a mesh.
LandmarkSet3D interpolate_landmarks(const ModelAsset& asset, const MatX3& vertices);

/// Full decode: shape offsets, joint regression, skinning, landmarks.
DecodeResult decode(const ModelAsset& asset, const ShapeParams& beta, const PoseParams& theta);

/// Mirrors the mesh across x=0 and flips yaw sign when yaw is negative, so
/// profiles always face the positive direction. Face winding is reversed to
/// keep outward normals consistent. Idempotent for yaw >= 0.
struct CanonicalizeResult {
  Mesh mesh;
  double yaw;
  bool flipped = false;
};
CanonicalizeResult canonicalize_profile(const Mesh& mesh, double yaw);

/// Deterministic procedural head-like asset for tests and demos: subdivided
/// icosphere template, sinusoidal shape basis orthogonal to rigid motions,
/// root + neck joints, banded skin weights, 68 landmark anchors and a
/// chin-to-ear jawline arc.
ModelAsset make_toy_model(std::uint64_t seed, int n_target, int shape_dim);

/// Asset container IO: a directory with model.json plus little-endian
/// float32/uint32 row-major .bin blobs, one per large array.
ModelAsset load_model_asset(const std::string& dir);
void save_model_asset(const ModelAsset& asset, const std::string& dir);

}  // namespace profilebench
