#pragma once

// Serial reference implementations used by tests and the benchmark. Each one
// favors the most literal formulation (exhaustive loops, chain walks, brute
// force) over speed so the optimized kernels in the main library have an
// independent answer to match.

#include <cstdint>
#include <vector>

#include "profilebench/camera.hpp"
#include "profilebench/image.hpp"
#include "profilebench/model.hpp"
#include "profilebench/raster.hpp"

namespace profilebench::refimpl {

// Exhaustive depth-buffer loop: every pixel tests every prepared triangle in
// ascending face order. Traversal is independent of the tiled rasterizer;
// the per-pixel sample arithmetic is shared so coverage decisions agree.
RasterBuffers rasterize_reference(const Camera& camera, const Mesh& mesh);

// Per-pixel ray casting (Moller-Trumbore against every triangle) instead of
// screen-space rasterization. Agrees with vertex_visibility on meshes whose
// triangles are not sub-pixel and whose edges avoid pixel centers.
VisibilityMask raycast_visibility(const Camera& camera, const Mesh& mesh, int resolution);

// Dense decode with explicit per-coordinate loops and per-joint parent-chain
// walks, no shared pose-transform code.
MatX3 decode_reference(const ModelAsset& asset, const ShapeParams& beta,
                       const PoseParams& theta);

// All-pairs nearest boundary distances (sum of directional means over the
// image diagonal), no distance transform involved.
double boundary_chamfer_reference(const Mask& a, const Mask& b);

// Exhaustive point-to-surface distance over all triangles.
double closest_distance_reference(const Mesh& mesh, const Vec3& point);

// O(pixels^2) exact squared Euclidean distance transform.
Image<double> brute_force_squared_edt(const Mask& seeds);

// Single-threaded copies of the image kernels for the benchmark baseline.
Image<double> squared_edt_serial(const Mask& seeds);
Image<double> sobel_magnitude_serial(const Image<double>& gray);

// Full 2^n enumeration of the signed-rank null distribution (n <= 20).
double wilcoxon_exact_enumeration(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace profilebench::refimpl
