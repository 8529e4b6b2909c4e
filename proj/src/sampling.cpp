#include "profilebench/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "profilebench/geometry.hpp"
#include "profilebench/rng.hpp"

namespace profilebench {

void SampleSpec::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("SampleSpec: sigma must be positive");
  if (!(clip > 0.0)) throw std::invalid_argument("SampleSpec: clip must be positive");
  if (!(yaw_min_deg < yaw_max_deg)) {
    throw std::invalid_argument("SampleSpec: yaw_min must be below yaw_max");
  }
  if (shape_dim < 1) {
    throw std::invalid_argument("SampleSpec: shape_dim must be at least 1");
  }
  // The first two non-yaw scalars are the out-of-plane global perturbation,
  // so the pose stream cannot be shorter than that.
  if (pose_dim < 2) {
    throw std::invalid_argument("SampleSpec: pose_dim must be at least 2");
  }
}

SampleRecord sample_record(const SampleSpec& spec, int id) {
  spec.validate();
  if (id < 0) throw std::invalid_argument("sample_record: id must be non-negative");

  SampleRecord rec;
  rec.id = id;
  rec.seed = Rng::stream_seed(spec.base_seed, static_cast<std::uint64_t>(id));
  Rng rng(rec.seed);

  rec.yaw_deg = rng.uniform(spec.yaw_min_deg, spec.yaw_max_deg);

  rec.beta = ShapeParams::zeros(spec.shape_dim);
  for (int k = 0; k < spec.shape_dim; ++k) {
    rec.beta.beta[k] = rng.truncated_normal(spec.sigma, spec.clip);
  }

  rec.pose_scalars.resize(spec.pose_dim);
  for (int k = 0; k < spec.pose_dim; ++k) {
    rec.pose_scalars[k] = rng.truncated_normal(spec.sigma, spec.clip);
  }

  // Global rotation: yaw about model-up applied first, then the sampled
  // out-of-plane perturbation (axis-angle with zero y component).
  const Vec3 perturb(rec.pose_scalars[0], 0.0, rec.pose_scalars[1]);
  const Mat3 global = rodrigues(perturb) * rotation_about_y(deg_to_rad(rec.yaw_deg));

  const int neck_scalars = spec.pose_dim - 2;
  rec.theta.global_rotation = rotation_log(global);
  rec.theta.articulated_rotations.assign((neck_scalars + 2) / 3, Vec3::Zero());
  for (std::size_t j = 0; j < rec.theta.articulated_rotations.size(); ++j) {
    Vec3 aa = Vec3::Zero();
    for (int c = 0; c < 3 && static_cast<int>(j) * 3 + c < neck_scalars; ++c) {
      aa[c] = rec.pose_scalars[2 + static_cast<int>(j) * 3 + c];
    }
    // Axis-angle norms at or above pi alias shorter rotations; redraw the
    // whole triple so stored rotations stay canonical.
    while (aa.norm() >= kPi) {
      for (int c = 0; c < 3 && static_cast<int>(j) * 3 + c < neck_scalars; ++c) {
        aa[c] = rng.truncated_normal(spec.sigma, spec.clip);
        rec.pose_scalars[2 + static_cast<int>(j) * 3 + c] = aa[c];
      }
    }
    rec.theta.articulated_rotations[j] = aa;
  }

  rec.theta.check_finite();
  return rec;
}

std::string assign_split(int id, const SplitSizes& sizes) {
  if (id < 0 || id >= sizes.total()) {
    throw std::out_of_range("assign_split: id " + std::to_string(id) +
                            " outside [0, " + std::to_string(sizes.total()) + ")");
  }
  if (id < sizes.train) return "train";
  if (id < sizes.train + sizes.val) return "val";
  return "test";
}

SplitSizes default_split_sizes(int count) {
  SplitSizes s;
  s.train = count * 8 / 10;
  s.val = count / 10;
  s.test = count - s.train - s.val;
  return s;
}

}  // namespace profilebench
