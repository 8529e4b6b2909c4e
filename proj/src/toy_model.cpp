#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "profilebench/model.hpp"
#include "profilebench/rng.hpp"

namespace profilebench {

namespace {

struct IcoMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

IcoMesh icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  IcoMesh m;
  m.vertices = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1},
  };
  for (Vec3& v : m.vertices) v.normalize();
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return m;
}

IcoMesh subdivide(const IcoMesh& in) {
  IcoMesh out;
  out.vertices = in.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec3 m = (out.vertices[static_cast<std::size_t>(a)] + out.vertices[static_cast<std::size_t>(b)]).normalized();
    out.vertices.push_back(m);
    int idx = static_cast<int>(out.vertices.size()) - 1;
    midpoint.emplace(key, idx);
    return idx;
  };
  for (const auto& f : in.faces) {
    int a = mid(f[0], f[1]);
    int b = mid(f[1], f[2]);
    int c = mid(f[2], f[0]);
    out.faces.push_back({f[0], a, c});
    out.faces.push_back({f[1], b, a});
    out.faces.push_back({f[2], c, b});
    out.faces.push_back({a, b, c});
  }
  return out;
}

// Greedy nearest-unused vertex to a query direction.
int nearest_unused(const MatX3& vertices, const Vec3& dir, std::vector<std::uint8_t>& used) {
  int best = -1;
  double best_dot = -2.0;
  for (int i = 0; i < vertices.rows(); ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    double d = vertices.row(i).normalized().dot(dir);
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  if (best < 0) throw std::runtime_error("make_toy_model: ran out of vertices for jawline band");
  used[static_cast<std::size_t>(best)] = 1;
  return best;
}

}  // namespace

ModelAsset make_toy_model(std::uint64_t seed, int n_target, int shape_dim) {
  if (shape_dim < 1) throw std::runtime_error("make_toy_model: shape_dim must be >= 1");
  if (n_target < 12) throw std::runtime_error("make_toy_model: n_target must be >= 12");

  IcoMesh ico = icosahedron();
  // enough faces for 68 landmarks on distinct faces
  while (static_cast<int>(ico.vertices.size()) < n_target ||
         static_cast<int>(ico.faces.size()) < 80) {
    ico = subdivide(ico);
  }

  const int n = static_cast<int>(ico.vertices.size());
  const int f_count = static_cast<int>(ico.faces.size());

  // Head-like ellipsoid, sized so the default camera frames it with margin.
  const Vec3 radii(0.075, 0.095, 0.085);
  ModelAsset asset;
  asset.name = "toy-head";
  asset.version = "1";
  asset.template_vertices.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    Vec3 v = ico.vertices[static_cast<std::size_t>(i)];
    // gentle nose bump on the +z (forward) side
    double bump = 0.25 * std::max(0.0, v.z()) * std::exp(-8.0 * (v.head<2>() - Vec2(0.0, -0.1)).squaredNorm());
    Vec3 p = (1.0 + bump) * v;
    asset.template_vertices.row(i) = p.cwiseProduct(radii).transpose();
  }
  asset.faces.resize(f_count, 3);
  for (int f = 0; f < f_count; ++f) {
    for (int c = 0; c < 3; ++c) asset.faces(f, c) = ico.faces[static_cast<std::size_t>(f)][c];
  }

  // Random sinusoidal shape basis. Each vector is orthogonalized against the
  // six rigid-motion fields (and its predecessors) so shape changes are never
  // absorbable by pose, which keeps the landmark Jacobian well conditioned
  // for fitting.
  Rng rng(seed);
  std::vector<MatX3> frame;
  for (int axis = 0; axis < 3; ++axis) {
    MatX3 t = MatX3::Zero(n, 3);
    t.col(axis).setOnes();
    frame.push_back(t / t.norm());
  }
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 omega = Vec3::Unit(axis);
    MatX3 r(n, 3);
    for (int i = 0; i < n; ++i) {
      r.row(i) = omega.cross(asset.template_vertices.row(i).transpose()).transpose();
    }
    for (const MatX3& prev : frame) r -= prev.cwiseProduct(r).sum() * prev;
    frame.push_back(r / r.norm());
  }

  asset.shape_basis.reserve(static_cast<std::size_t>(shape_dim));
  for (int s = 0; s < shape_dim; ++s) {
    MatX3 basis = MatX3::Zero(n, 3);
    for (int wave = 0; wave < 4; ++wave) {
      Vec3 u(rng.normal(), rng.normal(), rng.normal());
      u.normalize();
      Vec3 dir(rng.normal(), rng.normal(), rng.normal());
      dir.normalize();
      double freq = rng.uniform(30.0, 90.0);
      double phase = rng.uniform(0.0, 2.0 * kPi);
      double amp = rng.uniform(0.5, 1.0);
      for (int i = 0; i < n; ++i) {
        double a = amp * std::sin(freq * asset.template_vertices.row(i).dot(u) + phase);
        basis.row(i) += a * dir.transpose();
      }
    }
    for (const MatX3& prev : frame) basis -= prev.cwiseProduct(basis).sum() * prev;
    basis /= basis.norm();
    frame.push_back(basis);
    // Amplified so one unit of any component moves landmarks by a clearly
    // identifiable amount relative to the head size.
    asset.shape_basis.push_back(2.5 * basis);
  }

  // Two joints: root at the centroid, neck regressed from the lower band.
  asset.joint_parents = {-1, 0};
  asset.joint_regressor = Eigen::MatrixXd::Zero(2, n);
  asset.joint_regressor.row(0).setConstant(1.0 / n);
  double neck_total = 0.0;
  const double y_lo = -0.55 * radii.y();
  for (int i = 0; i < n; ++i) {
    double w = std::max(0.0, y_lo - asset.template_vertices(i, 1));
    asset.joint_regressor(1, i) = w;
    neck_total += w;
  }
  asset.joint_regressor.row(1) /= neck_total;

  // Skin weights: all-neck below the band, all-root above, linear in between.
  // Quantized to multiples of 1/1024 so both columns are float32-exact and
  // each row sums to exactly 1 (decode at rest pose must return the template
  // bit for bit, and the float32 container round trip must not drift).
  asset.skin_weights.resize(n, 2);
  const double band_hi = -0.25 * radii.y();
  const double band_lo = -0.55 * radii.y();
  for (int i = 0; i < n; ++i) {
    double y = asset.template_vertices(i, 1);
    double w_neck = std::clamp((band_hi - y) / (band_hi - band_lo), 0.0, 1.0);
    w_neck = std::round(w_neck * 1024.0) / 1024.0;
    asset.skin_weights(i, 1) = w_neck;
    asset.skin_weights(i, 0) = 1.0 - w_neck;
  }

  // 68 landmarks on distinct forward-hemisphere faces; the first 17 carry
  // contour flags per the 68-point convention.
  std::vector<int> candidate_faces;
  for (int f = 0; f < f_count; ++f) {
    Vec3 centroid = Vec3::Zero();
    for (int c = 0; c < 3; ++c) centroid += asset.template_vertices.row(asset.faces(f, c)).transpose();
    centroid /= 3.0;
    if (centroid.z() > 0.15 * radii.z()) candidate_faces.push_back(f);
  }
  const int k_landmarks = 68;
  if (static_cast<int>(candidate_faces.size()) < k_landmarks) {
    candidate_faces.clear();
    for (int f = 0; f < f_count; ++f) candidate_faces.push_back(f);
  }
  asset.landmarks.reserve(k_landmarks);
  const double stride = static_cast<double>(candidate_faces.size()) / k_landmarks;
  for (int m = 0; m < k_landmarks; ++m) {
    LandmarkAnchor lm;
    lm.face = candidate_faces[static_cast<std::size_t>(m * stride)];
    double u = rng.uniform();
    double v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    lm.bary = Vec3(1.0 - u - v, u, v);
    lm.label = "lm_" + std::to_string(m);
    lm.contour = m < 17;
    asset.landmarks.push_back(lm);
  }

  // Jawline band: great-circle arc from the chin to the ear on the side that
  // faces the camera after a positive yaw.
  const int jaw_count = std::min(65, n - 3);
  const Vec3 chin_dir = Vec3(0.0, -0.85, 0.5).normalized();
  const Vec3 ear_dir = Vec3(-0.95, -0.05, -0.2).normalized();
  const double arc_angle = std::acos(std::clamp(chin_dir.dot(ear_dir), -1.0, 1.0));
  const Vec3 arc_axis = chin_dir.cross(ear_dir).normalized();
  std::vector<std::uint8_t> used(static_cast<std::size_t>(n), 0);
  asset.jawline_indices.reserve(static_cast<std::size_t>(jaw_count));
  for (int k = 0; k < jaw_count; ++k) {
    double t = (jaw_count == 1) ? 0.0 : static_cast<double>(k) / (jaw_count - 1);
    Vec3 dir = rodrigues(arc_axis * (t * arc_angle)) * chin_dir;
    asset.jawline_indices.push_back(nearest_unused(asset.template_vertices, dir, used));
  }

  // Snap every real array to float32-representable values so the asset
  // survives the float32 container round trip bit for bit.
  auto snap = [](double v) { return static_cast<double>(static_cast<float>(v)); };
  asset.template_vertices = asset.template_vertices.unaryExpr(snap);
  for (MatX3& b : asset.shape_basis) b = b.unaryExpr(snap);
  asset.joint_regressor = asset.joint_regressor.unaryExpr(snap);
  asset.skin_weights = asset.skin_weights.unaryExpr(snap);
  for (LandmarkAnchor& lm : asset.landmarks) lm.bary = lm.bary.unaryExpr(snap);

  asset.validate();
  return asset;
}

}  // namespace profilebench
