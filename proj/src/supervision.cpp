#include "profilebench/supervision.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace profilebench {

void LossWeights::validate() const {
  if (!(w_param >= 0.0) || !(w_lm3d >= 0.0) || !(w_jaw >= 0.0) ||
      !std::isfinite(w_param) || !std::isfinite(w_lm3d) || !std::isfinite(w_jaw)) {
    throw std::invalid_argument("LossWeights: weights must be finite and nonnegative");
  }
}

Eigen::VectorXd pose_to_vector(const PoseParams& theta) {
  Eigen::VectorXd v(theta.dim());
  v.segment<3>(0) = theta.global_rotation;
  for (std::size_t j = 0; j < theta.articulated_rotations.size(); ++j) {
    v.segment<3>(3 + 3 * static_cast<long>(j)) = theta.articulated_rotations[j];
  }
  return v;
}

PoseParams vector_to_pose(const Eigen::VectorXd& v) {
  if (v.size() < 3 || v.size() % 3 != 0) {
    throw std::invalid_argument("vector_to_pose: size must be a positive multiple of 3");
  }
  PoseParams theta;
  theta.global_rotation = v.segment<3>(0);
  theta.articulated_rotations.resize(static_cast<std::size_t>(v.size() / 3 - 1));
  for (std::size_t j = 0; j < theta.articulated_rotations.size(); ++j) {
    theta.articulated_rotations[j] = v.segment<3>(3 + 3 * static_cast<long>(j));
  }
  return theta;
}

namespace {

std::vector<int> non_contour_landmarks(const ModelAsset& asset) {
  std::vector<int> idx;
  for (int k = 0; k < asset.landmark_count(); ++k) {
    if (!asset.landmarks[static_cast<std::size_t>(k)].contour) idx.push_back(k);
  }
  return idx;
}

}  // namespace

LossBreakdown compute_loss_with_visibility(const ModelAsset& asset,
                                           const ShapeParams& pred_beta,
                                           const PoseParams& pred_theta,
                                           const ShapeParams& gt_beta,
                                           const PoseParams& gt_theta,
                                           const VisibilityMask& gt_visibility,
                                           const LossWeights& weights) {
  weights.validate();
  if (pred_beta.dim() != gt_beta.dim()) {
    throw std::invalid_argument("compute_loss: shape parameter dims differ");
  }
  if (pred_theta.dim() != gt_theta.dim()) {
    throw std::invalid_argument("compute_loss: pose parameter dims differ");
  }

  const DecodeResult pred = decode(asset, pred_beta, pred_theta);
  const DecodeResult gt = decode(asset, gt_beta, gt_theta);

  LossBreakdown out;
  out.l_param = (pred_beta.beta - gt_beta.beta).squaredNorm() +
                (pose_to_vector(pred_theta) - pose_to_vector(gt_theta)).squaredNorm();

  const std::vector<int> lm_idx = non_contour_landmarks(asset);
  out.n_landmarks_used = static_cast<int>(lm_idx.size());
  double lm_sum = 0.0;
  for (int k : lm_idx) {
    lm_sum += (pred.landmarks.points.row(k) - gt.landmarks.points.row(k)).squaredNorm();
  }
  out.l_lm3d = lm_idx.empty() ? 0.0 : lm_sum / static_cast<double>(lm_idx.size());

  double jaw_sum = 0.0;
  for (int v : asset.jawline_indices) {
    if (!gt_visibility.visible[static_cast<std::size_t>(v)]) continue;
    jaw_sum += (pred.mesh.vertices.row(v) - gt.mesh.vertices.row(v)).squaredNorm();
    ++out.n_visible_jaw;
  }
  if (out.n_visible_jaw > 0) out.l_jaw = jaw_sum / out.n_visible_jaw;

  out.total = weights.w_param * out.l_param + weights.w_lm3d * out.l_lm3d +
              weights.w_jaw * out.l_jaw.value_or(0.0);
  return out;
}

LossBreakdown compute_loss(const ModelAsset& asset, const ShapeParams& pred_beta,
                           const PoseParams& pred_theta, const ShapeParams& gt_beta,
                           const PoseParams& gt_theta, const Camera& gt_camera,
                           const LossWeights& weights) {
  const DecodeResult gt = decode(asset, gt_beta, gt_theta);
  const VisibilityMask vis =
      vertex_visibility(gt_camera, gt.mesh, defaults::kVisibilityResolution);
  return compute_loss_with_visibility(asset, pred_beta, pred_theta, gt_beta, gt_theta,
                                      vis, weights);
}

DecodeDerivatives decode_derivatives(const ModelAsset& asset, const ShapeParams& beta,
                                     const PoseParams& theta,
                                     const std::vector<int>& vertex_subset) {
  const int n_sub = static_cast<int>(vertex_subset.size());
  const int s_dim = asset.shape_dim();
  const int j_count = asset.joint_count();
  const int root = asset.root_joint();
  for (int v : vertex_subset) {
    if (v < 0 || v >= asset.vertex_count()) {
      throw std::out_of_range("decode_derivatives: vertex index");
    }
  }
  if (beta.dim() != s_dim) throw std::invalid_argument("decode_derivatives: beta dim");

  const MatX3 shaped = shape_vertices(asset, beta);
  const PoseTransforms tf = compute_pose_transforms(asset, shaped, theta);

  // Joints in parent-before-child order for the forward recursions.
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(j_count));
  {
    std::vector<std::uint8_t> placed(static_cast<std::size_t>(j_count), 0);
    while (static_cast<int>(order.size()) < j_count) {
      for (int j = 0; j < j_count; ++j) {
        if (placed[static_cast<std::size_t>(j)]) continue;
        const int p = asset.joint_parents[static_cast<std::size_t>(j)];
        if (p < 0 || placed[static_cast<std::size_t>(p)]) {
          order.push_back(j);
          placed[static_cast<std::size_t>(j)] = 1;
        }
      }
    }
  }

  DecodeDerivatives out;
  out.positions.resize(n_sub, 3);
  {
    const MatX3 posed = pose_vertices(asset, shaped, tf);
    for (int i = 0; i < n_sub; ++i) out.positions.row(i) = posed.row(vertex_subset[i]);
  }

  // Shape directions: rotations are independent of beta, so only rest
  // positions and joint translations move.
  out.d_beta.assign(static_cast<std::size_t>(s_dim), MatX3::Zero(n_sub, 3));
  for (int s = 0; s < s_dim; ++s) {
    const MatX3& basis = asset.shape_basis[static_cast<std::size_t>(s)];
    MatX3 d_joint = asset.joint_regressor * basis;  // J x 3
    std::vector<Vec3> d_t(static_cast<std::size_t>(j_count));
    for (int j : order) {
      const int p = asset.joint_parents[static_cast<std::size_t>(j)];
      const Vec3 b_j = d_joint.row(j).transpose();
      if (p < 0) {
        d_t[static_cast<std::size_t>(j)] = b_j;
      } else {
        const Vec3 b_p = d_joint.row(p).transpose();
        d_t[static_cast<std::size_t>(j)] =
            tf.world_rotation[static_cast<std::size_t>(p)] * (b_j - b_p) +
            d_t[static_cast<std::size_t>(p)];
      }
    }
    MatX3& dst = out.d_beta[static_cast<std::size_t>(s)];
    for (int i = 0; i < n_sub; ++i) {
      const int v = vertex_subset[i];
      Vec3 acc = Vec3::Zero();
      for (int j = 0; j < j_count; ++j) {
        const double w = asset.skin_weights(v, j);
        if (w == 0.0) continue;
        const Vec3 dx = basis.row(v).transpose() - d_joint.row(j).transpose();
        acc += w * (tf.world_rotation[static_cast<std::size_t>(j)] * dx +
                    d_t[static_cast<std::size_t>(j)]);
      }
      dst.row(i) = acc.transpose();
    }
  }

  // Pose directions: forward-mode through the transform chain, one axis-angle
  // component at a time.
  out.d_theta.assign(static_cast<std::size_t>(3 * j_count), MatX3::Zero(n_sub, 3));
  for (int k = 0; k < j_count; ++k) {
    const Vec3 aa = (k == root)
                        ? theta.global_rotation
                        : [&] {
                            int idx = 0;
                            for (int j = 0; j < k; ++j) {
                              if (j != root) ++idx;
                            }
                            return theta.articulated_rotations[static_cast<std::size_t>(idx)];
                          }();
    const std::array<Mat3, 3> d_rot = rodrigues_jacobian(aa);
    for (int c = 0; c < 3; ++c) {
      std::vector<Mat3> d_w(static_cast<std::size_t>(j_count), Mat3::Zero());
      std::vector<Vec3> d_t(static_cast<std::size_t>(j_count), Vec3::Zero());
      for (int j : order) {
        const int p = asset.joint_parents[static_cast<std::size_t>(j)];
        const Mat3 d_local = (j == k) ? d_rot[static_cast<std::size_t>(c)] : Mat3::Zero();
        if (p < 0) {
          d_w[static_cast<std::size_t>(j)] = d_local;
          // root translation is the rest joint itself
        } else {
          const Mat3 local = joint_local_rotation(asset, theta, j);
          d_w[static_cast<std::size_t>(j)] =
              d_w[static_cast<std::size_t>(p)] * local +
              tf.world_rotation[static_cast<std::size_t>(p)] * d_local;
          const Vec3 offset =
              (tf.rest_joints.row(j) - tf.rest_joints.row(p)).transpose();
          d_t[static_cast<std::size_t>(j)] =
              d_w[static_cast<std::size_t>(p)] * offset + d_t[static_cast<std::size_t>(p)];
        }
      }
      MatX3& dst = out.d_theta[static_cast<std::size_t>(3 * k + c)];
      for (int i = 0; i < n_sub; ++i) {
        const int v = vertex_subset[i];
        Vec3 acc = Vec3::Zero();
        for (int j = 0; j < j_count; ++j) {
          const double w = asset.skin_weights(v, j);
          if (w == 0.0) continue;
          const Vec3 rel =
              (shaped.row(v) - tf.rest_joints.row(j)).transpose();
          acc += w * (d_w[static_cast<std::size_t>(j)] * rel +
                      d_t[static_cast<std::size_t>(j)]);
        }
        dst.row(i) = acc.transpose();
      }
    }
  }
  return out;
}

LossGradient loss_gradient(const ModelAsset& asset, const ShapeParams& pred_beta,
                           const PoseParams& pred_theta, const ShapeParams& gt_beta,
                           const PoseParams& gt_theta, const VisibilityMask& gt_visibility,
                           const LossWeights& weights) {
  weights.validate();
  const int s_dim = asset.shape_dim();
  const int t_dim = 3 * asset.joint_count();

  LossGradient grad;
  grad.d_beta = 2.0 * weights.w_param * (pred_beta.beta - gt_beta.beta);
  grad.d_theta = 2.0 * weights.w_param *
                 (pose_to_vector(pred_theta) - pose_to_vector(gt_theta));

  // Vertex set needed: all landmark-face corners plus visible jaw vertices.
  std::vector<int> lm_idx = non_contour_landmarks(asset);
  std::vector<int> subset;
  std::vector<std::uint8_t> in_subset(static_cast<std::size_t>(asset.vertex_count()), 0);
  auto add_vertex = [&](int v) {
    if (!in_subset[static_cast<std::size_t>(v)]) {
      in_subset[static_cast<std::size_t>(v)] = 1;
      subset.push_back(v);
    }
  };
  for (int k : lm_idx) {
    const LandmarkAnchor& lm = asset.landmarks[static_cast<std::size_t>(k)];
    for (int c = 0; c < 3; ++c) add_vertex(asset.faces(lm.face, c));
  }
  std::vector<int> jaw_vis;
  for (int v : asset.jawline_indices) {
    if (gt_visibility.visible[static_cast<std::size_t>(v)]) {
      jaw_vis.push_back(v);
      add_vertex(v);
    }
  }
  std::vector<int> pos_in_subset(static_cast<std::size_t>(asset.vertex_count()), -1);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    pos_in_subset[static_cast<std::size_t>(subset[i])] = static_cast<int>(i);
  }

  const DecodeDerivatives pred_d = decode_derivatives(asset, pred_beta, pred_theta, subset);
  const DecodeResult gt = decode(asset, gt_beta, gt_theta);
  const DecodeResult pred = decode(asset, pred_beta, pred_theta);

  // Landmark term: mean over K of squared distances.
  if (!lm_idx.empty()) {
    const double scale = 2.0 * weights.w_lm3d / static_cast<double>(lm_idx.size());
    for (int k : lm_idx) {
      const LandmarkAnchor& lm = asset.landmarks[static_cast<std::size_t>(k)];
      const Vec3 diff = (pred.landmarks.points.row(k) - gt.landmarks.points.row(k)).transpose();
      for (int s = 0; s < s_dim; ++s) {
        Vec3 d_lm = Vec3::Zero();
        for (int c = 0; c < 3; ++c) {
          const int row = pos_in_subset[static_cast<std::size_t>(asset.faces(lm.face, c))];
          d_lm += lm.bary[c] *
                  pred_d.d_beta[static_cast<std::size_t>(s)].row(row).transpose();
        }
        grad.d_beta[s] += scale * diff.dot(d_lm);
      }
      for (int t = 0; t < t_dim; ++t) {
        Vec3 d_lm = Vec3::Zero();
        for (int c = 0; c < 3; ++c) {
          const int row = pos_in_subset[static_cast<std::size_t>(asset.faces(lm.face, c))];
          d_lm += lm.bary[c] *
                  pred_d.d_theta[static_cast<std::size_t>(t)].row(row).transpose();
        }
        grad.d_theta[t] += scale * diff.dot(d_lm);
      }
    }
  }

  // Jaw term: mean over the ground-truth-visible jaw vertices.
  if (!jaw_vis.empty()) {
    const double scale = 2.0 * weights.w_jaw / static_cast<double>(jaw_vis.size());
    for (int v : jaw_vis) {
      const int row = pos_in_subset[static_cast<std::size_t>(v)];
      const Vec3 diff = (pred.mesh.vertices.row(v) - gt.mesh.vertices.row(v)).transpose();
      for (int s = 0; s < s_dim; ++s) {
        grad.d_beta[s] +=
            scale *
            diff.dot(pred_d.d_beta[static_cast<std::size_t>(s)].row(row).transpose());
      }
      for (int t = 0; t < t_dim; ++t) {
        grad.d_theta[t] +=
            scale *
            diff.dot(pred_d.d_theta[static_cast<std::size_t>(t)].row(row).transpose());
      }
    }
  }
  return grad;
}

FitResult fit_landmarks(const ModelAsset& asset, const LandmarkSet3D& target,
                        const ShapeParams& init_beta, const PoseParams& init_theta,
                        const FitOptions& options) {
  if (target.count() != asset.landmark_count()) {
    throw std::invalid_argument("fit_landmarks: target landmark count mismatch");
  }
  if (options.regularization < 0.0) {
    throw std::invalid_argument("fit_landmarks: negative regularization");
  }
  if (init_beta.dim() != asset.shape_dim()) {
    throw std::invalid_argument("fit_landmarks: init beta dim");
  }

  const int k_count = asset.landmark_count();
  const int s_dim = asset.shape_dim();
  const int t_dim = 3 * asset.joint_count();
  const int n_params = s_dim + t_dim;
  const int n_res = 3 * k_count + s_dim;
  const double sqrt_reg = std::sqrt(options.regularization);

  std::vector<int> subset;
  std::vector<int> pos_in_subset(static_cast<std::size_t>(asset.vertex_count()), -1);
  for (const LandmarkAnchor& lm : asset.landmarks) {
    for (int c = 0; c < 3; ++c) {
      const int v = asset.faces(lm.face, c);
      if (pos_in_subset[static_cast<std::size_t>(v)] < 0) {
        pos_in_subset[static_cast<std::size_t>(v)] = static_cast<int>(subset.size());
        subset.push_back(v);
      }
    }
  }

  auto pack = [&](const ShapeParams& b, const PoseParams& t) {
    Eigen::VectorXd p(n_params);
    p.head(s_dim) = b.beta;
    p.tail(t_dim) = pose_to_vector(t);
    return p;
  };
  auto unpack_beta = [&](const Eigen::VectorXd& p) {
    return ShapeParams(p.head(s_dim));
  };
  auto unpack_theta = [&](const Eigen::VectorXd& p) {
    return vector_to_pose(p.tail(t_dim));
  };
  // A step can leave the canonical rotation ball; wrapping through the
  // rotation it represents keeps the residual identical and the decode legal.
  auto canonicalize = [&](Eigen::VectorXd p) {
    PoseParams t = unpack_theta(p);
    if (t.global_rotation.norm() > kPi) {
      t.global_rotation = rotation_log(rodrigues(t.global_rotation));
    }
    for (Vec3& aa : t.articulated_rotations) {
      if (aa.norm() > kPi) aa = rotation_log(rodrigues(aa));
    }
    p.tail(t_dim) = pose_to_vector(t);
    return p;
  };

  auto residual = [&](const Eigen::VectorXd& p) {
    const DecodeResult dec = decode(asset, unpack_beta(p), unpack_theta(p));
    Eigen::VectorXd r(n_res);
    for (int k = 0; k < k_count; ++k) {
      r.segment<3>(3 * k) =
          (dec.landmarks.points.row(k) - target.points.row(k)).transpose();
    }
    r.tail(s_dim) = sqrt_reg * p.head(s_dim);
    return r;
  };

  auto jacobian = [&](const Eigen::VectorXd& p) {
    const DecodeDerivatives d =
        decode_derivatives(asset, unpack_beta(p), unpack_theta(p), subset);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_res, n_params);
    for (int k = 0; k < k_count; ++k) {
      const LandmarkAnchor& lm = asset.landmarks[static_cast<std::size_t>(k)];
      for (int c = 0; c < 3; ++c) {
        const int row = pos_in_subset[static_cast<std::size_t>(asset.faces(lm.face, c))];
        const double w = lm.bary[c];
        for (int s = 0; s < s_dim; ++s) {
          jac.block<3, 1>(3 * k, s) +=
              w * d.d_beta[static_cast<std::size_t>(s)].row(row).transpose();
        }
        for (int t = 0; t < t_dim; ++t) {
          jac.block<3, 1>(3 * k, s_dim + t) +=
              w * d.d_theta[static_cast<std::size_t>(t)].row(row).transpose();
        }
      }
    }
    for (int s = 0; s < s_dim; ++s) jac(3 * k_count + s, s) = sqrt_reg;
    return jac;
  };

  FitResult out;
  Eigen::VectorXd p = pack(init_beta, init_theta);
  Eigen::VectorXd r = residual(p);
  double cost = r.squaredNorm();
  if (!std::isfinite(cost)) throw std::runtime_error("fit_landmarks: non-finite residual");
  out.residual_history.push_back(cost);

  double mu = options.initial_damping;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::MatrixXd jac = jacobian(p);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;

    bool accepted = false;
    for (int attempt = 0; attempt < 32; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal().array() += mu;
      const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
      const Eigen::VectorXd p_new = canonicalize(p + step);
      const Eigen::VectorXd r_new = residual(p_new);
      const double cost_new = r_new.squaredNorm();
      if (!std::isfinite(cost_new)) {
        throw std::runtime_error("fit_landmarks: diverged after " +
                                 std::to_string(it) + " iterations");
      }
      if (cost_new < cost) {
        const double decrease = (cost - cost_new) / std::max(cost, 1e-300);
        const double step_norm = step.norm();
        p = p_new;
        r = r_new;
        cost = cost_new;
        out.residual_history.push_back(cost);
        mu = std::max(mu * 0.1, 1e-15);
        accepted = true;
        ++out.iterations;
        if (step_norm < options.step_tolerance ||
            decrease < options.decrease_tolerance) {
          out.converged = true;
        }
        break;
      }
      mu *= 10.0;
      if (mu > 1e15) break;
    }
    if (!accepted || out.converged) {
      out.converged = out.converged || !accepted;
      break;
    }
  }

  out.beta = unpack_beta(p);
  out.theta = unpack_theta(p);
  return out;
}

}  // namespace profilebench
