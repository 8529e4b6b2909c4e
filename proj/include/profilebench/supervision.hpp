#pragma once

#include <optional>
#include <vector>

#include "profilebench/camera.hpp"
#include "profilebench/defaults.hpp"
#include "profilebench/model.hpp"
#include "profilebench/raster.hpp"

namespace profilebench {

struct LossWeights {
  double w_param = defaults::kWeightParam;
  double w_lm3d = defaults::kWeightLm3d;
  double w_jaw = defaults::kWeightJaw;

  void validate() const;
};

struct LossBreakdown {
  double l_param = 0.0;
  double l_lm3d = 0.0;
  std::optional<double> l_jaw;  // empty when no jawline vertex is visible
  double total = 0.0;
  int n_visible_jaw = 0;
  int n_landmarks_used = 0;

  bool jaw_defined() const { return l_jaw.has_value(); }
};

// Concatenates global and articulated axis-angle components.
Eigen::VectorXd pose_to_vector(const PoseParams& theta);
PoseParams vector_to_pose(const Eigen::VectorXd& v);

// l_param: squared parameter distance. l_lm3d: mean squared distance over
// non-contour landmarks. l_jaw: mean squared distance over jawline vertices
// visible in the ground-truth render. total: weighted sum of the defined
// terms.
LossBreakdown compute_loss(const ModelAsset& asset, const ShapeParams& pred_beta,
                           const PoseParams& pred_theta, const ShapeParams& gt_beta,
                           const PoseParams& gt_theta, const Camera& gt_camera,
                           const LossWeights& weights);

// Same with the ground-truth visibility already computed (it depends only on
// the ground truth, so callers may cache it).
LossBreakdown compute_loss_with_visibility(const ModelAsset& asset,
                                           const ShapeParams& pred_beta,
                                           const PoseParams& pred_theta,
                                           const ShapeParams& gt_beta,
                                           const PoseParams& gt_theta,
                                           const VisibilityMask& gt_visibility,
                                           const LossWeights& weights);

struct LossGradient {
  Eigen::VectorXd d_beta;
  Eigen::VectorXd d_theta;
};

// Analytic gradient of the total loss w.r.t. the predicted parameters. The
// visibility set is a constant of the ground truth.
LossGradient loss_gradient(const ModelAsset& asset, const ShapeParams& pred_beta,
                           const PoseParams& pred_theta, const ShapeParams& gt_beta,
                           const PoseParams& gt_theta, const VisibilityMask& gt_visibility,
                           const LossWeights& weights);

// Forward-mode derivatives of posed vertex positions for a vertex subset.
// d_beta[s] and d_theta[c] hold d(position)/d(component) for the subset rows.
struct DecodeDerivatives {
  MatX3 positions;               // posed subset vertices
  std::vector<MatX3> d_beta;     // shape_dim entries
  std::vector<MatX3> d_theta;    // 3 * joint_count entries
};

DecodeDerivatives decode_derivatives(const ModelAsset& asset, const ShapeParams& beta,
                                     const PoseParams& theta,
                                     const std::vector<int>& vertex_subset);

struct FitOptions {
  double regularization = 1e-6;  // Tikhonov weight on beta
  int max_iterations = 100;
  double step_tolerance = 1e-10;
  double decrease_tolerance = 1e-12;
  double initial_damping = 1e-3;
};

struct FitResult {
  ShapeParams beta;
  PoseParams theta;
  std::vector<double> residual_history;  // damped objective per accepted step
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt fit of shape and pose to target 3D landmarks with the
// residual [landmarks(p) - target; sqrt(lambda) * beta].
FitResult fit_landmarks(const ModelAsset& asset, const LandmarkSet3D& target,
                        const ShapeParams& init_beta, const PoseParams& init_theta,
                        const FitOptions& options = {});

}  // namespace profilebench
