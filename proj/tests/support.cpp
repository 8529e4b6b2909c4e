#include "support.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <tuple>

namespace profilebench::testsupport {

const ModelAsset& toy_asset(std::uint64_t seed, int n_target, int shape_dim) {
  static std::map<std::tuple<std::uint64_t, int, int>, ModelAsset> cache;
  auto key = std::make_tuple(seed, n_target, shape_dim);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, make_toy_model(seed, n_target, shape_dim)).first;
  }
  return it->second;
}

Mesh quad_mesh(double half, double z) {
  Mesh m;
  m.vertices.resize(4, 3);
  m.vertices << -half, -half, z, half, -half, z, half, half, z, -half, half, z;
  m.faces.resize(2, 3);
  m.faces << 0, 1, 2, 0, 2, 3;
  return m;
}

Mesh single_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
  Mesh m;
  m.vertices.resize(3, 3);
  m.vertices.row(0) = a;
  m.vertices.row(1) = b;
  m.vertices.row(2) = c;
  m.faces.resize(1, 3);
  m.faces << 0, 1, 2;
  return m;
}

Mesh uv_sphere(const Vec3& center, double radius, int rings, int segments) {
  Mesh m;
  const int n = (rings - 1) * segments + 2;
  m.vertices.resize(n, 3);
  int vi = 0;
  m.vertices.row(vi++) = center + Vec3(0, radius, 0);
  for (int r = 1; r < rings; ++r) {
    const double phi = kPi * r / rings;  // from +y pole
    for (int s = 0; s < segments; ++s) {
      const double th = 2.0 * kPi * s / segments;
      m.vertices.row(vi++) =
          center + radius * Vec3(std::sin(phi) * std::cos(th), std::cos(phi),
                                 std::sin(phi) * std::sin(th));
    }
  }
  m.vertices.row(vi++) = center - Vec3(0, radius, 0);

  // Winding chosen so geometric normals point outward.
  std::vector<int> tris;
  auto ring_vert = [&](int r, int s) { return 1 + (r - 1) * segments + (s % segments); };
  for (int s = 0; s < segments; ++s) {
    tris.insert(tris.end(), {0, ring_vert(1, s + 1), ring_vert(1, s)});
  }
  for (int r = 1; r < rings - 1; ++r) {
    for (int s = 0; s < segments; ++s) {
      const int a = ring_vert(r, s), b = ring_vert(r, s + 1);
      const int c = ring_vert(r + 1, s), d = ring_vert(r + 1, s + 1);
      tris.insert(tris.end(), {a, b, c});
      tris.insert(tris.end(), {b, d, c});
    }
  }
  const int south = n - 1;
  for (int s = 0; s < segments; ++s) {
    tris.insert(tris.end(), {south, ring_vert(rings - 1, s), ring_vert(rings - 1, s + 1)});
  }
  m.faces.resize(static_cast<long>(tris.size() / 3), 3);
  for (long f = 0; f < m.faces.rows(); ++f) {
    m.faces.row(f) << tris[3 * f], tris[3 * f + 1], tris[3 * f + 2];
  }
  return m;
}

Mesh random_triangle_soup(Rng& rng, int n_faces) {
  Mesh m;
  m.vertices.resize(3 * n_faces, 3);
  m.faces.resize(n_faces, 3);
  for (int f = 0; f < n_faces; ++f) {
    const Vec3 base = random_vec(rng, -0.12, 0.12);
    for (int c = 0; c < 3; ++c) {
      m.vertices.row(3 * f + c) = base + random_vec(rng, -0.06, 0.06);
      m.faces(f, c) = 3 * f + c;
    }
  }
  return m;
}

Mask blob_mask(Rng& rng, int width, int height, int n_blobs) {
  Mask m(width, height);
  for (int b = 0; b < n_blobs; ++b) {
    const double cx = rng.uniform(0.2 * width, 0.8 * width);
    const double cy = rng.uniform(0.2 * height, 0.8 * height);
    const double rx = rng.uniform(0.08 * width, 0.28 * width);
    const double ry = rng.uniform(0.08 * height, 0.28 * height);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double dx = (x - cx) / rx, dy = (y - cy) / ry;
        if (dx * dx + dy * dy <= 1.0) m.at(x, y) = 1;
      }
    }
  }
  if (count_nonzero(m) == 0) m.at(width / 2, height / 2) = 1;
  return m;
}

Mask ellipse_mask(int width, int height, double cx, double cy, double rx, double ry) {
  Mask m(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = (x - cx) / rx, dy = (y - cy) / ry;
      if (dx * dx + dy * dy <= 1.0) m.at(x, y) = 1;
    }
  }
  return m;
}

Mat3 random_rotation(Rng& rng) {
  Vec3 axis;
  do {
    axis = random_vec(rng, -1.0, 1.0);
  } while (axis.norm() < 1e-3 || axis.norm() > 1.0);
  axis.normalize();
  return rodrigues(axis * rng.uniform(1e-3, kPi - 1e-3));
}

Vec3 random_vec(Rng& rng, double lo, double hi) {
  return Vec3(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi));
}

ShapeParams random_beta(Rng& rng, int dim, double sigma, double clip) {
  ShapeParams b = ShapeParams::zeros(dim);
  for (int k = 0; k < dim; ++k) b.beta[k] = rng.truncated_normal(sigma, clip);
  return b;
}

PoseParams random_pose(Rng& rng, int joint_count, double max_angle) {
  PoseParams p = PoseParams::zeros(joint_count);
  auto draw = [&] {
    Vec3 aa = random_vec(rng, -1.0, 1.0);
    if (aa.norm() < 1e-6) aa = Vec3(1, 0, 0);
    return aa.normalized() * rng.uniform(0.0, max_angle);
  };
  p.global_rotation = draw();
  for (auto& aa : p.articulated_rotations) aa = draw();
  return p;
}

ModelAsset occlusion_fixture_asset() {
  ModelAsset asset;
  asset.name = "occlusion-fixture";
  asset.version = "1";

  // Vertices 0..3: front quad at z = 0.15 covering the whole view.
  // Vertices 4..6: small triangle at z = -0.1, hidden behind the quad.
  asset.template_vertices.resize(7, 3);
  asset.template_vertices << -0.3, -0.3, 0.15, 0.3, -0.3, 0.15, 0.3, 0.3, 0.15,
      -0.3, 0.3, 0.15, -0.04, -0.03, -0.1, 0.04, -0.03, -0.1, 0.0, 0.04, -0.1;
  asset.faces.resize(3, 3);
  asset.faces << 0, 1, 2, 0, 2, 3, 4, 5, 6;

  // Basis 0 lifts everything; basis 1 only touches the hidden triangle.
  MatX3 b0 = MatX3::Zero(7, 3);
  for (int i = 0; i < 7; ++i) b0.row(i) = Vec3(0.01, 0.02, 0.015);
  MatX3 b1 = MatX3::Zero(7, 3);
  b1.row(4) = Vec3(0.02, -0.01, 0.005);
  b1.row(5) = Vec3(-0.015, 0.02, 0.01);
  b1.row(6) = Vec3(0.01, 0.01, -0.02);
  asset.shape_basis = {b0, b1};

  asset.joint_parents = {-1};
  asset.joint_regressor = Eigen::MatrixXd::Constant(1, 7, 1.0 / 7.0);
  asset.skin_weights = Eigen::MatrixXd::Ones(7, 1);

  // Static landmarks on the front faces, contour landmarks on the hidden
  // face so contour motion is fully decoupled from the static set.
  auto anchor = [](int face, double u, double v, const std::string& label, bool contour) {
    LandmarkAnchor lm;
    lm.face = face;
    lm.bary = Vec3(1.0 - u - v, u, v);
    lm.label = label;
    lm.contour = contour;
    return lm;
  };
  asset.landmarks = {
      anchor(2, 0.2, 0.3, "contour_a", true),  anchor(2, 0.5, 0.25, "contour_b", true),
      anchor(0, 0.25, 0.25, "static_a", false), anchor(0, 0.6, 0.2, "static_b", false),
      anchor(1, 0.3, 0.4, "static_c", false),   anchor(1, 0.1, 0.7, "static_d", false),
  };

  // Jawline mixes visible quad corners with the hidden triangle.
  asset.jawline_indices = {0, 1, 4, 5, 6};
  asset.validate();
  return asset;
}

std::string temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto base = std::filesystem::temp_directory_path() / "profilebench_tests";
  std::filesystem::create_directories(base);
  auto dir = base / (tag + "_" + std::to_string(counter++) + "_" +
                     std::to_string(static_cast<unsigned>(::getpid())));
  std::filesystem::create_directories(dir);
  return dir.string();
}

void remove_tree(const std::string& path) {
  std::error_code ec;
  std::filesystem::remove_all(path, ec);
}

double truncated_normal_std(double sigma, double clip) {
  const double a = clip / sigma;
  const double phi = std::exp(-0.5 * a * a) / std::sqrt(2.0 * kPi);
  const double mass = std::erf(a / std::sqrt(2.0));  // 2*Phi(a) - 1
  return sigma * std::sqrt(1.0 - 2.0 * a * phi / mass);
}

}  // namespace profilebench::testsupport
