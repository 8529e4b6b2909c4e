#pragma once

#include <optional>
#include <string>
#include <vector>

#include "profilebench/align.hpp"
#include "profilebench/image.hpp"
#include "profilebench/model.hpp"
#include "profilebench/raster.hpp"

namespace profilebench {

// Undefined entries (empty vertex subsets, missing renders) stay nullopt and
// are never folded into aggregates as zeros.
struct MetricsReport {
  std::optional<double> e_all;
  std::optional<double> e_vis;
  std::optional<double> e_jaw;
  std::optional<double> e_jaw_vis;
  int n_all = 0;
  int n_vis = 0;
  int n_jaw = 0;
  int n_jaw_vis = 0;
  std::optional<double> iou;
  std::optional<double> boundary_chamfer;
};

// Mean Euclidean vertex distances after applying `transform` to pred, over
// all vertices, the visible subset, the jawline, and jawline-and-visible.
// Visibility comes from the ground-truth mesh and camera.
MetricsReport vertex_errors(const Mesh& pred, const Mesh& gt,
                            const RigidTransform& transform,
                            const VisibilityMask& visibility,
                            const std::vector<int>& jawline);

// |a AND b| / |a OR b|; 1.0 when both masks are empty.
double silhouette_iou(const Mask& a, const Mask& b);

// Symmetric chamfer between silhouette boundaries (morphological gradient,
// 3x3 cross): mean nearest distance a-boundary to b-boundary plus the
// reverse, normalized by the image diagonal. Throws when either boundary is
// empty, so an undefined distance is never reported as 0.
double boundary_chamfer(const Mask& a, const Mask& b);

struct ScanToMeshResult {
  Eigen::VectorXd distances;  // per scan point, after alignment
  double mean = 0.0;
  double median = 0.0;
  RigidTransform alignment;   // maps mesh into scan space
};

// 7-landmark rigid alignment of the mesh onto the scan, then exact
// point-to-surface distance per scan point.
ScanToMeshResult scan_to_mesh(const MatX3& scan_points, const Mesh& mesh,
                              const MatX3& landmarks_mesh, const MatX3& landmarks_scan);

struct RoiBox {
  double x0 = 0.55;  // anterior jawline band: right part of the frame
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;
};

struct ClinicalProxyConfig {
  RoiBox roi;
  double upper_fraction = 0.5;  // share of mask height forming the alignment box
  int min_boundary_px = 10;
  bool align = true;
};

struct ClinicalProxyResult {
  std::optional<double> mean_dist_px;
  std::string skip_reason;  // empty on success
  int n_roi_boundary_px = 0;
  double scale = 1.0;
  double dx = 0.0, dy = 0.0;

  bool ok() const { return mean_dist_px.has_value(); }
};

// Isotropic scale+translation from the upper-profile bounding boxes maps the
// predicted silhouette onto the clinical mask; the error is the mean
// clinical-boundary to predicted-boundary distance inside the ROI, in
// clinical-image pixels. Unusable inputs return a reason code instead of a
// number.
ClinicalProxyResult clinical_contour_proxy(const Mask& pred_silhouette,
                                           const Mask& clinical_mask,
                                           const ClinicalProxyConfig& config = {});

}  // namespace profilebench
