#pragma once

#include <vector>

#include "profilebench/geometry.hpp"

namespace profilebench {

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
  MatX3 apply(const MatX3& points) const;
  void validate() const;
};

// Closed-form least-squares similarity/rigid alignment minimizing
// sum_i ||s R src_i + t - dst_i||^2 over the given subset (all rows when
// empty). Throws on fewer than 3 points or a collinear configuration.
RigidTransform umeyama_align(const MatX3& src, const MatX3& dst,
                             const std::vector<int>& subset = {},
                             bool with_scale = false);

}  // namespace profilebench
