#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "profilebench/imgproc.hpp"
#include "profilebench/surface.hpp"

namespace profilebench::refimpl {

namespace {

RasterBuffers make_empty_buffers(const Camera& camera) {
  RasterBuffers buf;
  buf.width = camera.width;
  buf.height = camera.height;
  const std::size_t n = static_cast<std::size_t>(camera.width) * camera.height;
  buf.depth.assign(n, std::numeric_limits<double>::infinity());
  buf.face_id.assign(n, -1);
  buf.bary.assign(n * 3, 0.0);
  buf.silhouette.assign(n, 0);
  return buf;
}

}  // namespace

RasterBuffers rasterize_reference(const Camera& camera, const Mesh& mesh) {
  camera.validate();
  RasterBuffers buf = make_empty_buffers(camera);
  const std::vector<rasterdetail::PreparedTri> tris =
      rasterdetail::prepare_triangles(camera, mesh);

  for (int y = 0; y < buf.height; ++y) {
    for (int x = 0; x < buf.width; ++x) {
      double best_depth = std::numeric_limits<double>::infinity();
      int best_face = -1;
      double best_bary[3] = {0.0, 0.0, 0.0};
      for (const rasterdetail::PreparedTri& tri : tris) {
        double bary[3];
        double depth;
        if (!rasterdetail::sample_prepared(tri, x, y, bary, &depth)) continue;
        if (depth < best_depth) {
          best_depth = depth;
          best_face = tri.face;
          best_bary[0] = bary[0];
          best_bary[1] = bary[1];
          best_bary[2] = bary[2];
        }
      }
      if (best_face >= 0) {
        const std::size_t p = buf.index(x, y);
        buf.depth[p] = best_depth;
        buf.face_id[p] = best_face;
        buf.bary[p * 3 + 0] = best_bary[0];
        buf.bary[p * 3 + 1] = best_bary[1];
        buf.bary[p * 3 + 2] = best_bary[2];
        buf.silhouette[p] = 1;
      }
    }
  }
  return buf;
}

VisibilityMask raycast_visibility(const Camera& camera0, const Mesh& mesh, int resolution) {
  const Camera camera = camera0.with_resolution(resolution);
  camera.validate();
  const Vec3 origin(0.0, 0.0, camera.distance);

  // Triangles outside the depth range never win a pixel in the rasterizer,
  // so the ray caster ignores them the same way.
  std::vector<std::uint8_t> in_range(static_cast<std::size_t>(mesh.face_count()), 1);
  for (int f = 0; f < mesh.face_count(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const double d = camera.distance - mesh.vertices(mesh.faces(f, c), 2);
      if (!(d > camera.near && d < camera.far)) in_range[static_cast<std::size_t>(f)] = 0;
    }
    for (int c = 0; c < 3; ++c) {
      if (!mesh.vertices.row(mesh.faces(f, c)).allFinite())
        in_range[static_cast<std::size_t>(f)] = 0;
    }
  }

  std::vector<std::uint8_t> face_seen(static_cast<std::size_t>(mesh.face_count()), 0);
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      // Direction scaled so the ray parameter equals camera depth.
      const Vec3 target = unproject(camera, Vec2(x, y), 1.0);
      const Vec3 dir = target - origin;

      double best_t = std::numeric_limits<double>::infinity();
      int best_face = -1;
      for (int f = 0; f < mesh.face_count(); ++f) {
        if (!in_range[static_cast<std::size_t>(f)]) continue;
        const Vec3 v0 = mesh.vertices.row(mesh.faces(f, 0)).transpose();
        const Vec3 v1 = mesh.vertices.row(mesh.faces(f, 1)).transpose();
        const Vec3 v2 = mesh.vertices.row(mesh.faces(f, 2)).transpose();
        const Vec3 e1 = v1 - v0;
        const Vec3 e2 = v2 - v0;
        const Vec3 pvec = dir.cross(e2);
        const double det = e1.dot(pvec);
        if (std::abs(det) < 1e-14) continue;
        const double inv_det = 1.0 / det;
        const Vec3 tvec = origin - v0;
        const double u = tvec.dot(pvec) * inv_det;
        if (u < 0.0 || u > 1.0) continue;
        const Vec3 qvec = tvec.cross(e1);
        const double v = dir.dot(qvec) * inv_det;
        if (v < 0.0 || u + v > 1.0) continue;
        const double t = e2.dot(qvec) * inv_det;
        if (t <= camera.near || t >= camera.far) continue;
        if (t < best_t) {
          best_t = t;
          best_face = f;
        }
      }
      if (best_face >= 0) face_seen[static_cast<std::size_t>(best_face)] = 1;
    }
  }

  VisibilityMask mask;
  mask.resolution = resolution;
  mask.visible.assign(static_cast<std::size_t>(mesh.vertex_count()), 0);
  for (int f = 0; f < mesh.face_count(); ++f) {
    if (!face_seen[static_cast<std::size_t>(f)]) continue;
    for (int c = 0; c < 3; ++c) mask.visible[static_cast<std::size_t>(mesh.faces(f, c))] = 1;
  }
  return mask;
}

MatX3 decode_reference(const ModelAsset& asset, const ShapeParams& beta,
                       const PoseParams& theta) {
  const int n = asset.vertex_count();
  const int j_count = asset.joint_count();
  const int root = asset.root_joint();

  MatX3 shaped(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      double v = asset.template_vertices(i, c);
      for (int s = 0; s < asset.shape_dim(); ++s)
        v += beta.beta[s] * asset.shape_basis[static_cast<std::size_t>(s)](i, c);
      shaped(i, c) = v;
    }
  }

  MatX3 joints(j_count, 3);
  for (int j = 0; j < j_count; ++j) {
    for (int c = 0; c < 3; ++c) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) v += asset.joint_regressor(j, i) * shaped(i, c);
      joints(j, c) = v;
    }
  }

  // Articulated rotations are ordered by joint index with the root skipped.
  auto local_rotation = [&](int j) -> Mat3 {
    if (j == root) return rodrigues(theta.global_rotation);
    int slot = j < root ? j : j - 1;
    return rodrigues(theta.articulated_rotations.at(static_cast<std::size_t>(slot)));
  };

  std::vector<Mat3> world_r(static_cast<std::size_t>(j_count));
  std::vector<Vec3> world_t(static_cast<std::size_t>(j_count));
  for (int j = 0; j < j_count; ++j) {
    std::vector<int> chain;
    for (int k = j; k >= 0; k = asset.joint_parents[static_cast<std::size_t>(k)])
      chain.push_back(k);
    std::reverse(chain.begin(), chain.end());

    Mat3 w = Mat3::Identity();
    Vec3 t = Vec3::Zero();
    for (std::size_t step = 0; step < chain.size(); ++step) {
      const int k = chain[step];
      const Mat3 r = local_rotation(k);
      if (step == 0) {
        w = r;
        t = joints.row(k).transpose();
      } else {
        const int p = asset.joint_parents[static_cast<std::size_t>(k)];
        t = w * (joints.row(k).transpose() - joints.row(p).transpose()) + t;
        w = w * r;
      }
    }
    world_r[static_cast<std::size_t>(j)] = w;
    world_t[static_cast<std::size_t>(j)] = t;
  }

  MatX3 out(n, 3);
  for (int i = 0; i < n; ++i) {
    Vec3 acc = Vec3::Zero();
    const Vec3 v = shaped.row(i).transpose();
    for (int j = 0; j < j_count; ++j) {
      const double w = asset.skin_weights(i, j);
      if (w == 0.0) continue;
      const Vec3 jp = joints.row(j).transpose();
      acc += w * (world_r[static_cast<std::size_t>(j)] * (v - jp) +
                  world_t[static_cast<std::size_t>(j)]);
    }
    out.row(i) = acc.transpose();
  }
  return out;
}

double boundary_chamfer_reference(const Mask& a, const Mask& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("boundary_chamfer_reference: size mismatch");

  auto boundary_pixels = [](const Mask& m) {
    std::vector<std::pair<int, int>> px;
    const Mask boundary = mask_boundary(m);
    for (int y = 0; y < m.height; ++y)
      for (int x = 0; x < m.width; ++x)
        if (boundary.at(x, y)) px.emplace_back(x, y);
    return px;
  };

  const auto pa = boundary_pixels(a);
  const auto pb = boundary_pixels(b);
  if (pa.empty() || pb.empty())
    throw std::invalid_argument("boundary_chamfer_reference: empty silhouette boundary");

  auto directed_mean = [](const std::vector<std::pair<int, int>>& from,
                          const std::vector<std::pair<int, int>>& to) {
    double total = 0.0;
    for (const auto& [x, y] : from) {
      long best = std::numeric_limits<long>::max();
      for (const auto& [u, v] : to) {
        const long dx = x - u, dy = y - v;
        best = std::min(best, dx * dx + dy * dy);
      }
      total += std::sqrt(static_cast<double>(best));
    }
    return total / static_cast<double>(from.size());
  };

  const double diag = std::sqrt(static_cast<double>(a.width) * a.width +
                                static_cast<double>(a.height) * a.height);
  return (directed_mean(pa, pb) + directed_mean(pb, pa)) / diag;
}

double closest_distance_reference(const Mesh& mesh, const Vec3& point) {
  if (mesh.face_count() == 0)
    throw std::invalid_argument("closest_distance_reference: mesh has no faces");
  double best2 = std::numeric_limits<double>::infinity();
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Vec3 c = closest_point_on_triangle(point, mesh.vertices.row(mesh.faces(f, 0)).transpose(),
                                             mesh.vertices.row(mesh.faces(f, 1)).transpose(),
                                             mesh.vertices.row(mesh.faces(f, 2)).transpose());
    best2 = std::min(best2, (point - c).squaredNorm());
  }
  return std::sqrt(best2);
}

Image<double> brute_force_squared_edt(const Mask& seeds) {
  Image<double> out(seeds.width, seeds.height);
  for (int y = 0; y < seeds.height; ++y) {
    for (int x = 0; x < seeds.width; ++x) {
      double best = kEdtNoSeed;
      for (int v = 0; v < seeds.height; ++v) {
        for (int u = 0; u < seeds.width; ++u) {
          if (!seeds.at(u, v)) continue;
          const double dx = x - u, dy = y - v;
          best = std::min(best, dx * dx + dy * dy);
        }
      }
      out.at(x, y) = best;
    }
  }
  return out;
}

namespace {

void edt_1d_serial(const double* f, double* d, int n, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kEdtNoSeed;
  z[1] = kEdtNoSeed;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + static_cast<double>(q) * q) -
                (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
               (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + static_cast<double>(q) * q) -
           (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
          (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kEdtNoSeed;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

Image<double> squared_edt_serial(const Mask& mask) {
  const int w = mask.width, h = mask.height;
  Image<double> dist(w, h);
  const int n_max = std::max(w, h);
  std::vector<double> f(static_cast<std::size_t>(n_max));
  std::vector<double> d(static_cast<std::size_t>(n_max));
  std::vector<int> v(static_cast<std::size_t>(n_max));
  std::vector<double> z(static_cast<std::size_t>(n_max) + 1);

  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[static_cast<std::size_t>(y)] = mask.at(x, y) ? 0.0 : kEdtNoSeed;
    edt_1d_serial(f.data(), d.data(), h, v.data(), z.data());
    for (int y = 0; y < h; ++y) dist.at(x, y) = d[static_cast<std::size_t>(y)];
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = dist.at(x, y);
    edt_1d_serial(f.data(), d.data(), w, v.data(), z.data());
    for (int x = 0; x < w; ++x) dist.at(x, y) = d[static_cast<std::size_t>(x)];
  }
  return dist;
}

Image<double> sobel_magnitude_serial(const Image<double>& gray) {
  if (gray.channels != 1)
    throw std::invalid_argument("sobel_magnitude_serial: single channel only");
  const int w = gray.width, h = gray.height;
  Image<double> out(w, h);
  auto sample = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return gray.at(x, y);
  };
  const double norm = 4.0 * std::sqrt(2.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double tl = sample(x - 1, y - 1), tc = sample(x, y - 1), tr = sample(x + 1, y - 1);
      const double ml = sample(x - 1, y), mr = sample(x + 1, y);
      const double bl = sample(x - 1, y + 1), bc = sample(x, y + 1), br = sample(x + 1, y + 1);
      const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
      const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
      out.at(x, y) = std::sqrt(gx * gx + gy * gy) / norm;
    }
  }
  return out;
}

double wilcoxon_exact_enumeration(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("wilcoxon_exact_enumeration: length mismatch");
  std::vector<double> abs_d;
  std::vector<int> sign;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) continue;
    abs_d.push_back(std::abs(d));
    sign.push_back(d > 0.0 ? 1 : -1);
  }
  const int n = static_cast<int>(abs_d.size());
  if (n < 5) throw std::invalid_argument("wilcoxon_exact_enumeration: fewer than 5 nonzero pairs");
  if (n > 20) throw std::invalid_argument("wilcoxon_exact_enumeration: n too large to enumerate");

  // Doubled midranks stay integral under ties.
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return abs_d[i] < abs_d[j]; });
  std::vector<long> rank2(static_cast<std::size_t>(n), 0);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j < n && abs_d[static_cast<std::size_t>(idx[j])] ==
                        abs_d[static_cast<std::size_t>(idx[i])])
      ++j;
    const long r2 = i + 1 + j;  // 2 * average rank of the tie block
    for (int k = i; k < j; ++k) rank2[static_cast<std::size_t>(idx[k])] = r2;
    i = j;
  }

  long w2_obs = 0;
  for (int k = 0; k < n; ++k)
    if (sign[static_cast<std::size_t>(k)] > 0) w2_obs += rank2[static_cast<std::size_t>(k)];

  const std::uint64_t total = 1ULL << n;
  std::uint64_t count_le = 0, count_ge = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    long w2 = 0;
    for (int k = 0; k < n; ++k)
      if (mask & (1ULL << k)) w2 += rank2[static_cast<std::size_t>(k)];
    if (w2 <= w2_obs) ++count_le;
    if (w2 >= w2_obs) ++count_ge;
  }
  const double p = 2.0 * static_cast<double>(std::min(count_le, count_ge)) /
                   static_cast<double>(total);
  return std::min(1.0, p);
}

}  // namespace profilebench::refimpl
