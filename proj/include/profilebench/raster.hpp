#pragma once

#include <cstdint>
#include <vector>

#include "profilebench/camera.hpp"
#include "profilebench/model.hpp"

namespace profilebench {

struct RasterBuffers {
  int width = 0;
  int height = 0;
  std::vector<double> depth;          // +inf where empty
  std::vector<int> face_id;           // -1 where empty
  std::vector<double> bary;           // 3 per pixel, winning triangle
  std::vector<std::uint8_t> silhouette;

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  bool covered(int x, int y) const { return face_id[index(x, y)] >= 0; }
};

struct VisibilityMask {
  std::vector<std::uint8_t> visible;  // per vertex
  int resolution = 0;

  int count() const;
};

RasterBuffers rasterize(const Camera& camera, const Mesh& mesh);

// Camera-space normal map from interpolated area-weighted vertex normals;
// background pixels are (0,0,0). Row-major H*W*3.
std::vector<double> render_normals(const Camera& camera, const Mesh& mesh,
                                   const RasterBuffers& buffers);

MatX3 vertex_normals(const Mesh& mesh);

// Rasterizes at resolution^2; a vertex is visible iff one of its triangles
// owns at least one pixel.
VisibilityMask vertex_visibility(const Camera& camera, const Mesh& mesh,
                                 int resolution = defaults::kVisibilityResolution);

namespace rasterdetail {

// Screen-space triangle prepared for pixel sampling. The production
// rasterizer and the exhaustive reference loop both sample through
// sample_prepared so their per-pixel arithmetic is bit-identical and only
// the traversal strategy differs.
struct PreparedTri {
  int face = -1;
  double x0, y0, x1, y1, x2, y2;
  double inv_t0, inv_t1, inv_t2;
  double area;                  // signed, screen space
  int min_px, max_px, min_py, max_py;  // pixel bounds, already clamped
};

std::vector<PreparedTri> prepare_triangles(const Camera& camera, const Mesh& mesh);

// True when the pixel center lies inside the triangle; fills screen-space
// barycentrics and perspective-correct depth.
bool sample_prepared(const PreparedTri& tri, int px, int py, double bary_out[3],
                     double* depth_out);

}  // namespace rasterdetail

}  // namespace profilebench
