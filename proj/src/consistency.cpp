#include "profilebench/consistency.hpp"

#include <cmath>
#include <stdexcept>

#include "profilebench/imgproc.hpp"

namespace profilebench {

void ConsistencyConfig::validate() const {
  if (!(band_width_px > 0.0)) throw std::invalid_argument("ConsistencyConfig: band_width");
  if (!(sobel_threshold > 0.0 && sobel_threshold < 1.0)) {
    throw std::invalid_argument("ConsistencyConfig: sobel_threshold must be in (0,1)");
  }
  if (!(coverage_radius_px > 0.0)) {
    throw std::invalid_argument("ConsistencyConfig: coverage_radius");
  }
  if (resolution < 8) throw std::invalid_argument("ConsistencyConfig: resolution");
}

namespace {

ConsistencySetting measure(const Mask& boundary, const Mask& edges_in_band,
                           double coverage_radius) {
  ConsistencySetting s;
  s.n_edge_px = static_cast<int>(count_nonzero(edges_in_band));
  if (s.n_edge_px == 0) {
    s.reason = "no_edges_in_band";
    return s;
  }

  const Image<double> d2_edge = squared_edt(edges_in_band);
  const Image<double> d2_boundary = squared_edt(boundary);

  double sum_be = 0.0;
  std::size_t n_b = 0, covered = 0;
  const double r2 = coverage_radius * coverage_radius;
  for (int y = 0; y < boundary.height; ++y) {
    for (int x = 0; x < boundary.width; ++x) {
      if (!boundary.at(x, y)) continue;
      const double d2 = d2_edge.at(x, y);
      sum_be += std::sqrt(d2);
      covered += d2 <= r2;
      ++n_b;
    }
  }
  double sum_eb = 0.0;
  std::size_t n_e = 0;
  for (int y = 0; y < boundary.height; ++y) {
    for (int x = 0; x < boundary.width; ++x) {
      if (!edges_in_band.at(x, y)) continue;
      sum_eb += std::sqrt(d2_boundary.at(x, y));
      ++n_e;
    }
  }

  s.mean_dist_px = sum_be / static_cast<double>(n_b);
  s.sym_chamfer_px = sum_be / static_cast<double>(n_b) + sum_eb / static_cast<double>(n_e);
  s.coverage_at_radius = static_cast<double>(covered) / static_cast<double>(n_b);
  return s;
}

}  // namespace

ConsistencyReport consistency_check(const Image<std::uint8_t>& rgb,
                                    const Mask& gt_silhouette,
                                    const ConsistencyConfig& config) {
  config.validate();
  if (count_nonzero(gt_silhouette) == 0) {
    throw std::invalid_argument("consistency_check: empty silhouette");
  }
  if (rgb.empty()) throw std::invalid_argument("consistency_check: empty image");

  ConsistencyReport rep;
  rep.config = config;
  // The image raster is the working resolution; the silhouette is brought to
  // it and all distances are in its pixels.
  rep.resolution = std::max(rgb.width, rgb.height);
  const Mask sil = resize_nearest(gt_silhouette, rgb.width, rgb.height);

  // Boundary pixels on the image border are framing artifacts (a head
  // cropped at the frame bottom, say), not geometry the photo could confirm:
  // the replicate-padded gradient is blind there. Drop them before measuring.
  auto strip_border = [](Mask m) {
    for (int x = 0; x < m.width; ++x) {
      m.at(x, 0) = 0;
      m.at(x, m.height - 1) = 0;
    }
    for (int y = 0; y < m.height; ++y) {
      m.at(0, y) = 0;
      m.at(m.width - 1, y) = 0;
    }
    return m;
  };

  const Mask boundary = strip_border(mask_boundary(sil));
  rep.n_boundary_px = static_cast<int>(count_nonzero(boundary));
  if (rep.n_boundary_px == 0) {
    throw std::invalid_argument("consistency_check: silhouette has empty boundary");
  }

  const Mask edges = sobel_edges(to_gray(rgb), config.sobel_threshold);

  auto run_setting = [&](const Mask& bnd) {
    const Mask band = dilate_by_distance(bnd, config.band_width_px);
    Mask edges_in_band(edges.width, edges.height);
    for (std::size_t i = 0; i < edges.data.size(); ++i) {
      edges_in_band.data[i] = (edges.data[i] && band.data[i]) ? 1 : 0;
    }
    return measure(bnd, edges_in_band, config.coverage_radius_px);
  };

  rep.matched = run_setting(boundary);

  // Negative control: translate the silhouette, drop content leaving the
  // frame, and repeat the measurement against the same image edges.
  const Mask shifted_sil = translate(sil, config.control_shift_x, config.control_shift_y);
  const Mask shifted_boundary = strip_border(mask_boundary(shifted_sil));
  if (count_nonzero(shifted_boundary) == 0) {
    rep.shifted.reason = "shifted_boundary_empty";
  } else {
    rep.shifted = run_setting(shifted_boundary);
  }
  return rep;
}

}  // namespace profilebench
