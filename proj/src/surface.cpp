#include "profilebench/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace profilebench {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Region walk over the triangle's Voronoi regions (Ericson, Real-Time
  // Collision Detection, 5.1.5).
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + (vb * denom) * ab + (vc * denom) * ac;
}

TriangleBvh::TriangleBvh(const Mesh& mesh) : mesh_(mesh) {
  const long n = mesh.faces.rows();
  if (n == 0) throw std::invalid_argument("TriangleBvh: empty mesh");
  tri_order_.resize(static_cast<std::size_t>(n));
  std::iota(tri_order_.begin(), tri_order_.end(), 0);
  centroids_.resize(static_cast<std::size_t>(n));
  for (long f = 0; f < n; ++f) {
    centroids_[static_cast<std::size_t>(f)] =
        (mesh.vertices.row(mesh.faces(f, 0)) + mesh.vertices.row(mesh.faces(f, 1)) +
         mesh.vertices.row(mesh.faces(f, 2)))
            .transpose() /
        3.0;
  }
  nodes_.reserve(static_cast<std::size_t>(2 * n));
  root_ = build(0, static_cast<int>(n));
}

int TriangleBvh::build(int begin, int end) {
  Node node;
  node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  node.hi = -node.lo;
  for (int i = begin; i < end; ++i) {
    const int f = tri_order_[static_cast<std::size_t>(i)];
    for (int c = 0; c < 3; ++c) {
      const Vec3 v = mesh_.vertices.row(mesh_.faces(f, c)).transpose();
      node.lo = node.lo.cwiseMin(v);
      node.hi = node.hi.cwiseMax(v);
    }
  }

  constexpr int kLeafSize = 8;
  if (end - begin <= kLeafSize) {
    node.begin = begin;
    node.end = end;
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int axis = 0;
  const Vec3 extent = node.hi - node.lo;
  if (extent[1] > extent[axis]) axis = 1;
  if (extent[2] > extent[axis]) axis = 2;
  const int mid = (begin + end) / 2;
  std::nth_element(tri_order_.begin() + begin, tri_order_.begin() + mid,
                   tri_order_.begin() + end, [&](int fa, int fb) {
                     return centroids_[static_cast<std::size_t>(fa)][axis] <
                            centroids_[static_cast<std::size_t>(fb)][axis];
                   });

  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[static_cast<std::size_t>(self)].left = left;
  nodes_[static_cast<std::size_t>(self)].right = right;
  return self;
}

double TriangleBvh::box_distance2(const Node& node, const Vec3& p) const {
  double d2 = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double lo = node.lo[c] - p[c];
    const double hi = p[c] - node.hi[c];
    const double d = std::max({lo, hi, 0.0});
    d2 += d * d;
  }
  return d2;
}

double TriangleBvh::closest_distance(const Vec3& p) const {
  double best2 = std::numeric_limits<double>::infinity();
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (box_distance2(node, p) >= best2) continue;
    if (node.leaf()) {
      for (int i = node.begin; i < node.end; ++i) {
        const int f = tri_order_[static_cast<std::size_t>(i)];
        const Vec3 q = closest_point_on_triangle(
            p, mesh_.vertices.row(mesh_.faces(f, 0)).transpose(),
            mesh_.vertices.row(mesh_.faces(f, 1)).transpose(),
            mesh_.vertices.row(mesh_.faces(f, 2)).transpose());
        best2 = std::min(best2, (q - p).squaredNorm());
      }
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return std::sqrt(best2);
}

}  // namespace profilebench
