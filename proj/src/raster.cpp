#include "profilebench/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace profilebench {

namespace rasterdetail {

std::vector<PreparedTri> prepare_triangles(const Camera& camera, const Mesh& mesh) {
  const Projection proj = project(camera, mesh.vertices);
  std::vector<PreparedTri> tris;
  tris.reserve(static_cast<std::size_t>(mesh.faces.rows()));

  for (long f = 0; f < mesh.faces.rows(); ++f) {
    const int a = mesh.faces(f, 0), b = mesh.faces(f, 1), c = mesh.faces(f, 2);
    if (!proj.valid[a] || !proj.valid[b] || !proj.valid[c]) continue;

    PreparedTri t;
    t.face = static_cast<int>(f);
    t.x0 = proj.pixels(a, 0), t.y0 = proj.pixels(a, 1);
    t.x1 = proj.pixels(b, 0), t.y1 = proj.pixels(b, 1);
    t.x2 = proj.pixels(c, 0), t.y2 = proj.pixels(c, 1);
    t.area = (t.x1 - t.x0) * (t.y2 - t.y0) - (t.y1 - t.y0) * (t.x2 - t.x0);
    if (t.area == 0.0) continue;
    t.inv_t0 = 1.0 / proj.depth[a];
    t.inv_t1 = 1.0 / proj.depth[b];
    t.inv_t2 = 1.0 / proj.depth[c];

    const double min_x = std::min({t.x0, t.x1, t.x2});
    const double max_x = std::max({t.x0, t.x1, t.x2});
    const double min_y = std::min({t.y0, t.y1, t.y2});
    const double max_y = std::max({t.y0, t.y1, t.y2});
    t.min_px = std::max(0, static_cast<int>(std::ceil(min_x)));
    t.max_px = std::min(camera.width - 1, static_cast<int>(std::floor(max_x)));
    t.min_py = std::max(0, static_cast<int>(std::ceil(min_y)));
    t.max_py = std::min(camera.height - 1, static_cast<int>(std::floor(max_y)));
    if (t.min_px > t.max_px || t.min_py > t.max_py) continue;
    tris.push_back(t);
  }
  return tris;
}

bool sample_prepared(const PreparedTri& tri, int px, int py, double bary_out[3],
                     double* depth_out) {
  const double x = px, y = py;
  const double w0 = (tri.x2 - tri.x1) * (y - tri.y1) - (tri.y2 - tri.y1) * (x - tri.x1);
  const double w1 = (tri.x0 - tri.x2) * (y - tri.y2) - (tri.y0 - tri.y2) * (x - tri.x2);
  const double w2 = (tri.x1 - tri.x0) * (y - tri.y0) - (tri.y1 - tri.y0) * (x - tri.x0);
  if (tri.area > 0.0) {
    if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) return false;
  } else {
    if (w0 > 0.0 || w1 > 0.0 || w2 > 0.0) return false;
  }
  const double b0 = w0 / tri.area;
  const double b1 = w1 / tri.area;
  const double b2 = w2 / tri.area;
  bary_out[0] = b0;
  bary_out[1] = b1;
  bary_out[2] = b2;
  *depth_out = 1.0 / (b0 * tri.inv_t0 + b1 * tri.inv_t1 + b2 * tri.inv_t2);
  return true;
}

}  // namespace rasterdetail

using rasterdetail::PreparedTri;

RasterBuffers rasterize(const Camera& camera, const Mesh& mesh) {
  camera.validate();
  RasterBuffers buf;
  buf.width = camera.width;
  buf.height = camera.height;
  const std::size_t n_px = static_cast<std::size_t>(camera.width) * camera.height;
  buf.depth.assign(n_px, std::numeric_limits<double>::infinity());
  buf.face_id.assign(n_px, -1);
  buf.bary.assign(n_px * 3, 0.0);
  buf.silhouette.assign(n_px, 0);

  const std::vector<PreparedTri> tris = rasterdetail::prepare_triangles(camera, mesh);

  // Bin triangles to tiles, then fill tiles independently. Each pixel belongs
  // to exactly one tile and bins preserve ascending face order, so the result
  // is the same for any thread count.
  constexpr int kTile = 32;
  const int tiles_x = (camera.width + kTile - 1) / kTile;
  const int tiles_y = (camera.height + kTile - 1) / kTile;
  std::vector<std::vector<int>> bins(static_cast<std::size_t>(tiles_x) * tiles_y);
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const PreparedTri& t = tris[i];
    for (int ty = t.min_py / kTile; ty <= t.max_py / kTile; ++ty) {
      for (int tx = t.min_px / kTile; tx <= t.max_px / kTile; ++tx) {
        bins[static_cast<std::size_t>(ty) * tiles_x + tx].push_back(static_cast<int>(i));
      }
    }
  }

  const int n_tiles = tiles_x * tiles_y;
#pragma omp parallel for schedule(dynamic)
  for (int tile = 0; tile < n_tiles; ++tile) {
    const int tx = tile % tiles_x;
    const int ty = tile / tiles_x;
    const int x_lo = tx * kTile;
    const int x_hi = std::min(camera.width - 1, x_lo + kTile - 1);
    const int y_lo = ty * kTile;
    const int y_hi = std::min(camera.height - 1, y_lo + kTile - 1);

    for (int idx : bins[static_cast<std::size_t>(tile)]) {
      const PreparedTri& t = tris[static_cast<std::size_t>(idx)];
      const int px_lo = std::max(t.min_px, x_lo);
      const int px_hi = std::min(t.max_px, x_hi);
      const int py_lo = std::max(t.min_py, y_lo);
      const int py_hi = std::min(t.max_py, y_hi);
      for (int py = py_lo; py <= py_hi; ++py) {
        for (int px = px_lo; px <= px_hi; ++px) {
          double bary[3], depth;
          if (!rasterdetail::sample_prepared(t, px, py, bary, &depth)) continue;
          const std::size_t p = buf.index(px, py);
          if (depth < buf.depth[p]) {
            buf.depth[p] = depth;
            buf.face_id[p] = t.face;
            buf.bary[p * 3 + 0] = bary[0];
            buf.bary[p * 3 + 1] = bary[1];
            buf.bary[p * 3 + 2] = bary[2];
            buf.silhouette[p] = 1;
          }
        }
      }
    }
  }
  return buf;
}

MatX3 vertex_normals(const Mesh& mesh) {
  MatX3 normals = MatX3::Zero(mesh.vertices.rows(), 3);
  for (long f = 0; f < mesh.faces.rows(); ++f) {
    const int a = mesh.faces(f, 0), b = mesh.faces(f, 1), c = mesh.faces(f, 2);
    const Vec3 va = mesh.vertices.row(a);
    const Vec3 vb = mesh.vertices.row(b);
    const Vec3 vc = mesh.vertices.row(c);
    const Vec3 weighted = (vb - va).cross(vc - va);  // norm = 2 * face area
    normals.row(a) += weighted;
    normals.row(b) += weighted;
    normals.row(c) += weighted;
  }
  for (long v = 0; v < normals.rows(); ++v) {
    const double n = normals.row(v).norm();
    if (n > 0.0) normals.row(v) /= n;
  }
  return normals;
}

std::vector<double> render_normals(const Camera& camera, const Mesh& mesh,
                                   const RasterBuffers& buffers) {
  const MatX3 vn = vertex_normals(mesh);
  const std::size_t n_px = static_cast<std::size_t>(buffers.width) * buffers.height;
  std::vector<double> out(n_px * 3, 0.0);

  const long n_pixels = static_cast<long>(n_px);
#pragma omp parallel for schedule(static)
  for (long p = 0; p < n_pixels; ++p) {
    const int f = buffers.face_id[static_cast<std::size_t>(p)];
    if (f < 0) continue;
    const int a = mesh.faces(f, 0), b = mesh.faces(f, 1), c = mesh.faces(f, 2);
    const double* w = &buffers.bary[static_cast<std::size_t>(p) * 3];
    Vec3 n = w[0] * vn.row(a).transpose() + w[1] * vn.row(b).transpose() +
             w[2] * vn.row(c).transpose();
    const double len = n.norm();
    if (len > 0.0) n /= len;
    out[static_cast<std::size_t>(p) * 3 + 0] = n[0];
    out[static_cast<std::size_t>(p) * 3 + 1] = n[1];
    out[static_cast<std::size_t>(p) * 3 + 2] = n[2];
  }
  return out;
}

int VisibilityMask::count() const {
  int n = 0;
  for (std::uint8_t v : visible) n += v != 0;
  return n;
}

VisibilityMask vertex_visibility(const Camera& camera, const Mesh& mesh, int resolution) {
  const RasterBuffers buf = rasterize(camera.with_resolution(resolution), mesh);
  std::vector<std::uint8_t> face_visible(static_cast<std::size_t>(mesh.faces.rows()), 0);
  for (int f : buf.face_id) {
    if (f >= 0) face_visible[static_cast<std::size_t>(f)] = 1;
  }
  VisibilityMask mask;
  mask.resolution = resolution;
  mask.visible.assign(static_cast<std::size_t>(mesh.vertices.rows()), 0);
  for (long f = 0; f < mesh.faces.rows(); ++f) {
    if (!face_visible[static_cast<std::size_t>(f)]) continue;
    for (int c = 0; c < 3; ++c) mask.visible[static_cast<std::size_t>(mesh.faces(f, c))] = 1;
  }
  return mask;
}

}  // namespace profilebench
