#pragma once

#include <vector>

#include "profilebench/model.hpp"

namespace profilebench {

// Closest point on triangle (a,b,c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Axis-aligned-box tree over mesh triangles for exact nearest-surface
// queries. Pruning only skips boxes that cannot beat the current best, so
// distances equal the exhaustive minimum.
class TriangleBvh {
 public:
  explicit TriangleBvh(const Mesh& mesh);

  double closest_distance(const Vec3& p) const;

 private:
  struct Node {
    Vec3 lo, hi;
    int left = -1, right = -1;   // internal children
    int begin = 0, end = 0;      // leaf triangle range
    bool leaf() const { return left < 0; }
  };

  int build(int begin, int end);
  double box_distance2(const Node& node, const Vec3& p) const;

  const Mesh& mesh_;
  std::vector<int> tri_order_;
  std::vector<Vec3> centroids_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace profilebench
