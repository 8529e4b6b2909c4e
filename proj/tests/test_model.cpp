#include "doctest.h"

#include <cmath>

#include "profilebench/model.hpp"
#include "profilebench/rng.hpp"
#include "reference.hpp"
#include "support.hpp"

using namespace profilebench;
namespace ts = profilebench::testsupport;

namespace {

// Rigid-motion fields over the template: translations along each axis and
// infinitesimal rotations about each axis. A shape basis that leaks into
// this span would alias pose.
double rigid_leakage(const ModelAsset& asset, const MatX3& basis) {
  double worst = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    MatX3 t = MatX3::Zero(asset.vertex_count(), 3);
    t.col(axis).setOnes();
    worst = std::max(worst, std::abs(t.cwiseProduct(basis).sum() / t.norm()));

    MatX3 r(asset.vertex_count(), 3);
    for (int i = 0; i < asset.vertex_count(); ++i) {
      r.row(i) = Vec3::Unit(axis).cross(asset.template_vertices.row(i).transpose()).transpose();
    }
    worst = std::max(worst, std::abs(r.cwiseProduct(basis).sum() / r.norm()));
  }
  return worst;
}

}  // namespace

TEST_CASE("toy model is deterministic in the seed") {
  const ModelAsset a = make_toy_model(31, 400, 4);
  const ModelAsset b = make_toy_model(31, 400, 4);
  CHECK(a.content_hash() == b.content_hash());
  CHECK(a.template_vertices == b.template_vertices);
  CHECK(a.skin_weights == b.skin_weights);

  const ModelAsset c = make_toy_model(32, 400, 4);
  CHECK(a.content_hash() != c.content_hash());
}

TEST_CASE("toy model satisfies the landmark and jawline conventions") {
  const ModelAsset& asset = ts::toy_asset();
  CHECK(asset.landmark_count() == 68);
  int contour = 0;
  for (const auto& lm : asset.landmarks) contour += lm.contour ? 1 : 0;
  CHECK(contour == 17);
  CHECK(asset.jawline_indices.size() == 65);
  CHECK(asset.joint_count() == 2);
  CHECK(asset.root_joint() == 0);
}

TEST_CASE("toy basis vectors have the documented amplitude") {
  // The basis is deliberately not unit-norm: each vector carries a fixed 2.5
  // amplification so a unit coefficient produces a landmark displacement the
  // fitter can resolve against the 1e-6 regularizer.
  const ModelAsset& asset = ts::toy_asset();
  for (const MatX3& b : asset.shape_basis) {
    CHECK(b.norm() == doctest::Approx(2.5).epsilon(1e-5));
  }
}

TEST_CASE("toy basis is orthogonal to rigid motions of the template") {
  const ModelAsset& asset = ts::toy_asset();
  for (const MatX3& b : asset.shape_basis) {
    CHECK(rigid_leakage(asset, b) < 1e-4 * b.norm());
  }
}

TEST_CASE("decode at zero parameters returns the template") {
  const ModelAsset& asset = ts::toy_asset();
  const DecodeResult out = decode(asset, ShapeParams::zeros(asset.shape_dim()),
                                  PoseParams::zeros(asset.joint_count()));
  CHECK((out.mesh.vertices - asset.template_vertices).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(out.mesh.faces == asset.faces);

  const LandmarkSet3D lm = interpolate_landmarks(asset, asset.template_vertices);
  CHECK((out.landmarks.points - lm.points).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("global rotation alone is a rigid motion about the root joint") {
  const ModelAsset& asset = ts::toy_asset();
  PoseParams theta = PoseParams::zeros(asset.joint_count());
  theta.global_rotation = Vec3(0.3, 1.1, -0.4);
  const Mat3 r = rodrigues(theta.global_rotation);

  const DecodeResult out = decode(asset, ShapeParams::zeros(asset.shape_dim()), theta);
  const Vec3 root =
      (asset.joint_regressor.row(asset.root_joint()) * asset.template_vertices).transpose();
  for (int i = 0; i < asset.vertex_count(); i += 37) {
    const Vec3 expect = r * (asset.template_vertices.row(i).transpose() - root) + root;
    CHECK((out.mesh.vertices.row(i).transpose() - expect).norm() < 1e-12);
  }

  // Pairwise distances survive the motion.
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    const int i = static_cast<int>(rng.uniform_int(asset.vertex_count()));
    const int j = static_cast<int>(rng.uniform_int(asset.vertex_count()));
    const double before = (asset.template_vertices.row(i) - asset.template_vertices.row(j)).norm();
    const double after = (out.mesh.vertices.row(i) - out.mesh.vertices.row(j)).norm();
    CHECK(std::abs(before - after) < 1e-9);
  }
}

TEST_CASE("shape decode equals a dense flattened matrix product") {
  const ModelAsset& asset = ts::toy_asset();
  Rng rng(9);
  const ShapeParams beta = ts::random_beta(rng, asset.shape_dim(), 0.7, 2.0);

  // Independent formulation: flatten the basis into (3N x S) and multiply.
  const long n = asset.vertex_count();
  Eigen::MatrixXd flat(3 * n, asset.shape_dim());
  for (int s = 0; s < asset.shape_dim(); ++s) {
    for (long i = 0; i < n; ++i) {
      for (int c = 0; c < 3; ++c) flat(3 * i + c, s) = asset.shape_basis[s](i, c);
    }
  }
  const Eigen::VectorXd offsets = flat * beta.beta;

  const MatX3 shaped = shape_vertices(asset, beta);
  for (long i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      const double expect = asset.template_vertices(i, c) + offsets[3 * i + c];
      CHECK(std::abs(shaped(i, c) - expect) < 1e-12);
    }
  }
}

TEST_CASE("decode matches the serial reference decoder") {
  const ModelAsset& asset = ts::toy_asset();
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const ShapeParams beta = ts::random_beta(rng, asset.shape_dim(), 0.7, 2.0);
    const PoseParams theta = ts::random_pose(rng, asset.joint_count(), 2.5);
    const DecodeResult out = decode(asset, beta, theta);
    const MatX3 ref = refimpl::decode_reference(asset, beta, theta);
    CHECK((out.mesh.vertices - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("shape space is linear") {
  const ModelAsset& asset = ts::toy_asset();
  Rng rng(21);
  const ShapeParams b1 = ts::random_beta(rng, asset.shape_dim(), 0.7, 2.0);
  const ShapeParams b2 = ts::random_beta(rng, asset.shape_dim(), 0.7, 2.0);
  ShapeParams sum = b1;
  sum.beta += b2.beta;

  const PoseParams zero = PoseParams::zeros(asset.joint_count());
  const MatX3 d1 = decode(asset, b1, zero).mesh.vertices - asset.template_vertices;
  const MatX3 d2 = decode(asset, b2, zero).mesh.vertices - asset.template_vertices;
  const MatX3 ds = decode(asset, sum, zero).mesh.vertices - asset.template_vertices;
  CHECK((ds - d1 - d2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("vertices owned by a single joint move rigidly") {
  const ModelAsset& asset = ts::toy_asset();
  Rng rng(23);
  const PoseParams theta = ts::random_pose(rng, asset.joint_count(), 2.0);
  const DecodeResult out = decode(asset, ShapeParams::zeros(asset.shape_dim()), theta);

  for (int joint = 0; joint < asset.joint_count(); ++joint) {
    std::vector<int> owned;
    for (int i = 0; i < asset.vertex_count(); ++i) {
      if (asset.skin_weights(i, joint) == 1.0) owned.push_back(i);
    }
    CAPTURE(joint);
    CHECK(owned.size() >= 3);
    for (std::size_t k = 1; k < owned.size(); k += 7) {
      const int i = owned[k - 1], j = owned[k];
      const double before =
          (asset.template_vertices.row(i) - asset.template_vertices.row(j)).norm();
      const double after = (out.mesh.vertices.row(i) - out.mesh.vertices.row(j)).norm();
      CHECK(std::abs(before - after) < 1e-9);
    }
  }
}

TEST_CASE("equal world transforms blend to an exact rigid motion") {
  // With articulated rotations at identity every joint shares the root's
  // world transform; partition of unity then makes the blend exact.
  const ModelAsset& asset = ts::toy_asset();
  PoseParams theta = PoseParams::zeros(asset.joint_count());
  theta.global_rotation = Vec3(-0.2, 0.9, 0.5);
  const Mat3 r = rodrigues(theta.global_rotation);

  const MatX3 shaped = asset.template_vertices;
  const Vec3 root = (asset.joint_regressor.row(asset.root_joint()) * shaped).transpose();
  const DecodeResult out = decode(asset, ShapeParams::zeros(asset.shape_dim()), theta);
  for (int i = 0; i < asset.vertex_count(); ++i) {
    const Vec3 expect = r * (shaped.row(i).transpose() - root) + root;
    CHECK((out.mesh.vertices.row(i).transpose() - expect).norm() < 1e-9);
  }
}

TEST_CASE("decoded landmarks equal interpolation of the posed mesh") {
  const ModelAsset& asset = ts::toy_asset();
  Rng rng(27);
  const ShapeParams beta = ts::random_beta(rng, asset.shape_dim(), 0.7, 2.0);
  const PoseParams theta = ts::random_pose(rng, asset.joint_count(), 2.0);
  const DecodeResult out = decode(asset, beta, theta);

  for (int k = 0; k < asset.landmark_count(); ++k) {
    const LandmarkAnchor& lm = asset.landmarks[static_cast<std::size_t>(k)];
    Vec3 manual = Vec3::Zero();
    for (int c = 0; c < 3; ++c) {
      manual += lm.bary[c] * out.mesh.vertices.row(asset.faces(lm.face, c)).transpose();
    }
    CHECK((out.landmarks.points.row(k).transpose() - manual).norm() < 1e-7);
  }
  CHECK(out.landmarks.labels.size() == static_cast<std::size_t>(asset.landmark_count()));
}

TEST_CASE("decode rejects mismatched or non-finite parameters") {
  const ModelAsset& asset = ts::toy_asset();
  const PoseParams zero = PoseParams::zeros(asset.joint_count());
  CHECK_THROWS_WITH_AS(decode(asset, ShapeParams::zeros(asset.shape_dim() + 1), zero),
                       doctest::Contains("beta length"), std::runtime_error);

  ShapeParams bad = ShapeParams::zeros(asset.shape_dim());
  bad.beta[0] = std::nan("");
  CHECK_THROWS_AS(decode(asset, bad, zero), std::runtime_error);

  PoseParams wide = zero;
  wide.global_rotation = Vec3(3.2, 0, 0);  // just past the [0, pi) boundary
  CHECK_THROWS_WITH_AS(decode(asset, ShapeParams::zeros(asset.shape_dim()), wide),
                       doctest::Contains("canonical range"), std::runtime_error);
}

TEST_CASE("asset validation names the offending field and row") {
  ModelAsset asset = make_toy_model(3, 300, 2);

  SUBCASE("skin weight row summing to 0.9") {
    asset.skin_weights(5, 0) -= 0.1;
    CHECK_THROWS_WITH_AS(asset.validate(), doctest::Contains("skin_weights[5]"),
                         std::runtime_error);
  }
  SUBCASE("face index out of range") {
    asset.faces(2, 1) = asset.vertex_count();
    CHECK_THROWS_WITH_AS(asset.validate(), doctest::Contains("faces[2]"), std::runtime_error);
  }
  SUBCASE("duplicate jawline vertex") {
    asset.jawline_indices[1] = asset.jawline_indices[0];
    CHECK_THROWS_WITH_AS(asset.validate(), doctest::Contains("jawline_indices"),
                         std::runtime_error);
  }
  SUBCASE("second root joint") {
    asset.joint_parents[1] = -1;
    CHECK_THROWS_WITH_AS(asset.validate(), doctest::Contains("root"), std::runtime_error);
  }
}

TEST_CASE("canonicalize keeps positive yaw unchanged") {
  const Mesh mesh = decode(ts::toy_asset(), ShapeParams::zeros(ts::toy_asset().shape_dim()),
                           PoseParams::zeros(2))
                        .mesh;
  const CanonicalizeResult out = canonicalize_profile(mesh, deg_to_rad(90.0));
  CHECK_FALSE(out.flipped);
  CHECK(out.yaw == deg_to_rad(90.0));
  CHECK(out.mesh.vertices == mesh.vertices);
  CHECK(out.mesh.faces == mesh.faces);
}

TEST_CASE("canonicalize mirrors negative yaw and flips winding") {
  const ModelAsset& asset = ts::toy_asset();
  const Mesh mesh =
      decode(asset, ShapeParams::zeros(asset.shape_dim()), PoseParams::zeros(2)).mesh;
  const CanonicalizeResult out = canonicalize_profile(mesh, deg_to_rad(-90.0));
  CHECK(out.flipped);
  CHECK(out.yaw == deg_to_rad(90.0));

  for (int i = 0; i < mesh.vertex_count(); i += 11) {
    CHECK(out.mesh.vertices(i, 0) == -mesh.vertices(i, 0));
    CHECK(out.mesh.vertices(i, 1) == mesh.vertices(i, 1));
    CHECK(out.mesh.vertices(i, 2) == mesh.vertices(i, 2));
  }

  // Winding reversal must keep outward normals outward: the new face normal
  // is the mirror image of the old one.
  const Mat3 mirror = Vec3(-1, 1, 1).asDiagonal();
  for (int f = 0; f < mesh.face_count(); f += 13) {
    auto face_normal = [](const Mesh& m, int face) {
      const Vec3 a = m.vertices.row(m.faces(face, 0)).transpose();
      const Vec3 b = m.vertices.row(m.faces(face, 1)).transpose();
      const Vec3 c = m.vertices.row(m.faces(face, 2)).transpose();
      return Vec3((b - a).cross(c - a).normalized());
    };
    const Vec3 before = face_normal(mesh, f);
    const Vec3 after = face_normal(out.mesh, f);
    CHECK((after - mirror * before).norm() < 1e-9);
  }

  // Reflection is an isometry, exactly.
  Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    const int i = static_cast<int>(rng.uniform_int(mesh.vertex_count()));
    const int j = static_cast<int>(rng.uniform_int(mesh.vertex_count()));
    const double before = (mesh.vertices.row(i) - mesh.vertices.row(j)).squaredNorm();
    const double after = (out.mesh.vertices.row(i) - out.mesh.vertices.row(j)).squaredNorm();
    CHECK(before == after);
  }
}

TEST_CASE("canonicalize is idempotent") {
  const ModelAsset& asset = ts::toy_asset();
  const Mesh mesh =
      decode(asset, ShapeParams::zeros(asset.shape_dim()), PoseParams::zeros(2)).mesh;
  const CanonicalizeResult once = canonicalize_profile(mesh, deg_to_rad(-90.0));
  const CanonicalizeResult twice = canonicalize_profile(once.mesh, once.yaw);
  CHECK_FALSE(twice.flipped);
  CHECK(twice.mesh.vertices == once.mesh.vertices);
  CHECK(twice.mesh.faces == once.mesh.faces);
  CHECK(twice.yaw == once.yaw);
}
