#include "profilebench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "profilebench/imgproc.hpp"
#include "profilebench/surface.hpp"

namespace profilebench {

MetricsReport vertex_errors(const Mesh& pred, const Mesh& gt,
                            const RigidTransform& transform,
                            const VisibilityMask& visibility,
                            const std::vector<int>& jawline) {
  const long n = gt.vertices.rows();
  if (pred.vertices.rows() != n) {
    throw std::invalid_argument("vertex_errors: meshes differ in vertex count");
  }
  if (static_cast<long>(visibility.visible.size()) != n) {
    throw std::invalid_argument("vertex_errors: visibility size mismatch");
  }

  const MatX3 aligned = transform.apply(pred.vertices);
  std::vector<std::uint8_t> on_jaw(static_cast<std::size_t>(n), 0);
  for (int j : jawline) {
    if (j < 0 || j >= n) throw std::out_of_range("vertex_errors: jawline index");
    on_jaw[static_cast<std::size_t>(j)] = 1;
  }

  MetricsReport rep;
  double sum_all = 0.0, sum_vis = 0.0, sum_jaw = 0.0, sum_jaw_vis = 0.0;
  for (long i = 0; i < n; ++i) {
    const double d = (aligned.row(i) - gt.vertices.row(i)).norm();
    sum_all += d;
    ++rep.n_all;
    const bool vis = visibility.visible[static_cast<std::size_t>(i)] != 0;
    if (vis) {
      sum_vis += d;
      ++rep.n_vis;
    }
    if (on_jaw[static_cast<std::size_t>(i)]) {
      sum_jaw += d;
      ++rep.n_jaw;
      if (vis) {
        sum_jaw_vis += d;
        ++rep.n_jaw_vis;
      }
    }
  }
  if (rep.n_all > 0) rep.e_all = sum_all / rep.n_all;
  if (rep.n_vis > 0) rep.e_vis = sum_vis / rep.n_vis;
  if (rep.n_jaw > 0) rep.e_jaw = sum_jaw / rep.n_jaw;
  if (rep.n_jaw_vis > 0) rep.e_jaw_vis = sum_jaw_vis / rep.n_jaw_vis;
  return rep;
}

double silhouette_iou(const Mask& a, const Mask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("silhouette_iou: dimension mismatch");
  }
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const bool pa = a.data[i] != 0, pb = b.data[i] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double boundary_chamfer(const Mask& a, const Mask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("boundary_chamfer: dimension mismatch");
  }
  const Mask ba = mask_boundary(a);
  const Mask bb = mask_boundary(b);
  const std::size_t na = count_nonzero(ba);
  const std::size_t nb = count_nonzero(bb);
  if (na == 0 || nb == 0) {
    throw std::invalid_argument("boundary_chamfer: empty silhouette boundary");
  }

  const Image<double> da = squared_edt(ba);
  const Image<double> db = squared_edt(bb);
  double sum_ab = 0.0, sum_ba = 0.0;
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      if (ba.at(x, y)) sum_ab += std::sqrt(db.at(x, y));
      if (bb.at(x, y)) sum_ba += std::sqrt(da.at(x, y));
    }
  }
  const double chamfer = sum_ab / static_cast<double>(na) + sum_ba / static_cast<double>(nb);
  return chamfer / std::sqrt(static_cast<double>(a.width) * a.width +
                             static_cast<double>(a.height) * a.height);
}

ScanToMeshResult scan_to_mesh(const MatX3& scan_points, const Mesh& mesh,
                              const MatX3& landmarks_mesh, const MatX3& landmarks_scan) {
  if (scan_points.rows() == 0) throw std::invalid_argument("scan_to_mesh: empty scan");
  if (landmarks_mesh.rows() != 7 || landmarks_scan.rows() != 7) {
    throw std::invalid_argument("scan_to_mesh: expected 7 landmark correspondences");
  }

  ScanToMeshResult out;
  out.alignment = umeyama_align(landmarks_mesh, landmarks_scan);

  Mesh aligned;
  aligned.vertices = out.alignment.apply(mesh.vertices);
  aligned.faces = mesh.faces;
  const TriangleBvh bvh(aligned);

  const long p = scan_points.rows();
  out.distances.resize(p);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < p; ++i) {
    out.distances[i] = bvh.closest_distance(scan_points.row(i).transpose());
  }

  out.mean = out.distances.mean();
  std::vector<double> sorted(out.distances.data(), out.distances.data() + p);
  std::sort(sorted.begin(), sorted.end());
  out.median = (p % 2 == 1) ? sorted[static_cast<std::size_t>(p / 2)]
                            : 0.5 * (sorted[static_cast<std::size_t>(p / 2 - 1)] +
                                     sorted[static_cast<std::size_t>(p / 2)]);
  return out;
}

namespace {

struct Bbox {
  int min_x = 0, min_y = 0, max_x = -1, max_y = -1;
  bool empty() const { return max_x < min_x || max_y < min_y; }
  double diag() const {
    const double w = max_x - min_x + 1, h = max_y - min_y + 1;
    return std::sqrt(w * w + h * h);
  }
  double cx() const { return 0.5 * (min_x + max_x); }
  double cy() const { return 0.5 * (min_y + max_y); }
};

// Bounding box of the top `fraction` of the mask's own vertical extent.
Bbox upper_profile_bbox(const Mask& mask, double fraction) {
  int y_min = mask.height, y_max = -1;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) {
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    }
  }
  Bbox box;
  if (y_max < y_min) return box;
  const double cutoff = y_min + fraction * (y_max - y_min + 1);
  box.min_x = mask.width;
  box.min_y = mask.height;
  for (int y = y_min; y <= y_max && y < cutoff; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      box.min_x = std::min(box.min_x, x);
      box.max_x = std::max(box.max_x, x);
      box.min_y = std::min(box.min_y, y);
      box.max_y = std::max(box.max_y, y);
    }
  }
  return box;
}

}  // namespace

ClinicalProxyResult clinical_contour_proxy(const Mask& pred_silhouette,
                                           const Mask& clinical_mask,
                                           const ClinicalProxyConfig& config) {
  if (count_nonzero(clinical_mask) == 0) {
    throw std::invalid_argument("clinical_contour_proxy: empty clinical mask");
  }
  const RoiBox& roi = config.roi;
  if (!(roi.x0 >= 0.0 && roi.y0 >= 0.0 && roi.x1 <= 1.0 && roi.y1 <= 1.0 &&
        roi.x0 < roi.x1 && roi.y0 < roi.y1)) {
    throw std::invalid_argument("clinical_contour_proxy: ROI outside image");
  }

  ClinicalProxyResult out;
  if (count_nonzero(pred_silhouette) == 0) {
    out.skip_reason = "empty_prediction";
    return out;
  }

  Mask transformed(clinical_mask.width, clinical_mask.height);
  if (config.align) {
    const Bbox pred_box = upper_profile_bbox(pred_silhouette, config.upper_fraction);
    const Bbox clin_box = upper_profile_bbox(clinical_mask, config.upper_fraction);
    if (pred_box.empty() || pred_box.diag() < 2.0 || clin_box.empty()) {
      out.skip_reason = "invalid_bbox";
      return out;
    }
    out.scale = clin_box.diag() / pred_box.diag();
    out.dx = clin_box.cx() - out.scale * pred_box.cx();
    out.dy = clin_box.cy() - out.scale * pred_box.cy();
  } else {
    if (pred_silhouette.width != clinical_mask.width ||
        pred_silhouette.height != clinical_mask.height) {
      throw std::invalid_argument(
          "clinical_contour_proxy: alignment disabled requires equal sizes");
    }
  }
  for (int y = 0; y < transformed.height; ++y) {
    for (int x = 0; x < transformed.width; ++x) {
      const int sx = static_cast<int>(std::lround((x - out.dx) / out.scale));
      const int sy = static_cast<int>(std::lround((y - out.dy) / out.scale));
      if (sx < 0 || sx >= pred_silhouette.width || sy < 0 || sy >= pred_silhouette.height) {
        continue;
      }
      transformed.at(x, y) = pred_silhouette.at(sx, sy);
    }
  }

  const Mask pred_boundary = mask_boundary(transformed);
  if (count_nonzero(pred_boundary) == 0) {
    out.skip_reason = "empty_prediction";
    return out;
  }
  const Mask clin_boundary = mask_boundary(clinical_mask);

  const int rx0 = static_cast<int>(roi.x0 * clinical_mask.width);
  const int rx1 = static_cast<int>(roi.x1 * clinical_mask.width);
  const int ry0 = static_cast<int>(roi.y0 * clinical_mask.height);
  const int ry1 = static_cast<int>(roi.y1 * clinical_mask.height);

  const Image<double> d2 = squared_edt(pred_boundary);
  double sum = 0.0;
  int count = 0;
  for (int y = ry0; y < ry1; ++y) {
    for (int x = rx0; x < rx1; ++x) {
      if (!clin_boundary.at(x, y)) continue;
      sum += std::sqrt(d2.at(x, y));
      ++count;
    }
  }
  out.n_roi_boundary_px = count;
  if (count < config.min_boundary_px) {
    out.skip_reason = "roi_too_small";
    return out;
  }
  out.mean_dist_px = sum / count;
  return out;
}

}  // namespace profilebench
