#pragma once

// Shared fixtures for the test binaries: cached toy assets, simple meshes,
// random mask generators and the hand-built occlusion asset used by the
// visibility-masking loss tests.

#include <cstdint>
#include <string>

#include "profilebench/image.hpp"
#include "profilebench/model.hpp"
#include "profilebench/rng.hpp"
#include "profilebench/sampling.hpp"

namespace profilebench::testsupport {

// Cached by (seed, n_target, shape_dim); building one takes a moment and
// several suites share the same configuration.
const ModelAsset& toy_asset(std::uint64_t seed = 7, int n_target = 900, int shape_dim = 8);

// Axis-aligned square of half-extent `half` in the z = `z` plane, split
// into two triangles, facing the camera.
Mesh quad_mesh(double half, double z);

// Single triangle through the given corners.
Mesh single_triangle(const Vec3& a, const Vec3& b, const Vec3& c);

// UV sphere centered at `center`. Poles are triangle fans, the rest quads
// split in two.
Mesh uv_sphere(const Vec3& center, double radius, int rings, int segments);

// Mesh with `n_faces` random triangles inside the camera frustum near the
// origin, vertices unshared.
Mesh random_triangle_soup(Rng& rng, int n_faces);

// Union of a few random filled ellipses; never empty.
Mask blob_mask(Rng& rng, int width, int height, int n_blobs = 3);

// Single filled ellipse with margin from the frame, for shift tests.
Mask ellipse_mask(int width, int height, double cx, double cy, double rx, double ry);

// Uniformly random rotation (axis uniform on the sphere, angle in (0, pi)).
Mat3 random_rotation(Rng& rng);

Vec3 random_vec(Rng& rng, double lo, double hi);

ShapeParams random_beta(Rng& rng, int dim, double sigma, double clip);

// Two-joint pose with bounded angles, away from the axis-angle boundary.
PoseParams random_pose(Rng& rng, int joint_count, double max_angle);

// Large front quad hiding a small back triangle. The back triangle's
// vertices sit on the jawline and the second shape-basis entry moves only
// them; the first basis entry moves everything. Both contour landmarks are
// anchored on the hidden face.
ModelAsset occlusion_fixture_asset();

// Fresh unique directory under the system temp root.
std::string temp_dir(const std::string& tag);

void remove_tree(const std::string& path);

// Exact truncated-normal standard deviation for N(0, sigma^2) restricted to
// [-clip, clip].
double truncated_normal_std(double sigma, double clip);

}  // namespace profilebench::testsupport
