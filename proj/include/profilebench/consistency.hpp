#pragma once

#include <optional>
#include <string>

#include "profilebench/defaults.hpp"
#include "profilebench/image.hpp"

namespace profilebench {

struct ConsistencyConfig {
  double band_width_px = defaults::kBandWidthPx;
  double sobel_threshold = defaults::kSobelThreshold;
  double coverage_radius_px = defaults::kCoverageRadiusPx;
  int control_shift_x = defaults::kControlShiftX;
  int control_shift_y = defaults::kControlShiftY;
  int resolution = defaults::kConsistencyResolution;

  void validate() const;
};

// One setting (matched or shifted control) of the boundary/edge agreement
// measurements. Distances are in pixels of the working resolution. Zero edge
// pixels in the band leaves the distances undefined with a reason code
// instead of zeros.
struct ConsistencySetting {
  std::optional<double> mean_dist_px;    // boundary -> edge nearest distance
  std::optional<double> sym_chamfer_px;  // plus the reverse direction
  std::optional<double> coverage_at_radius;
  int n_edge_px = 0;
  std::string reason;  // empty when defined
};

struct ConsistencyReport {
  ConsistencySetting matched;
  ConsistencySetting shifted;
  int n_boundary_px = 0;
  int resolution = 0;
  ConsistencyConfig config;
};

// Checks that strong image edges stay near the conditioning silhouette
// boundary: resize silhouette to the working resolution, extract its
// boundary, keep Sobel edges inside the boundary band, and measure
// boundary-to-edge distances. Boundary pixels on the image border are
// dropped first (a frame-cropped head produces them, and no photographic
// edge is observable there). The shifted silhouette repeats the measurement
// as a negative control.
ConsistencyReport consistency_check(const Image<std::uint8_t>& rgb,
                                    const Mask& gt_silhouette,
                                    const ConsistencyConfig& config = {});

}  // namespace profilebench
