#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "profilebench/model.hpp"

namespace profilebench {

struct SampleSpec {
  double sigma = 0.7;
  double clip = 2.0;
  double yaw_min_deg = 85.0;
  double yaw_max_deg = 95.0;
  int shape_dim = 300;
  int pose_dim = 5;  // non-yaw scalars: 2 global + 3 neck
  std::uint64_t base_seed = 0;

  void validate() const;
};

struct SampleRecord {
  int id = 0;
  std::uint64_t seed = 0;
  ShapeParams beta;
  PoseParams theta;
  std::vector<double> pose_scalars;  // raw non-yaw draws, composition inputs
  double yaw_deg = 0.0;
  std::string split;  // empty until assigned
};

// Deterministic in (spec.base_seed, id); records are independent streams.
SampleRecord sample_record(const SampleSpec& spec, int id);

struct SplitSizes {
  int train = 0;
  int val = 0;
  int test = 0;
  int total() const { return train + val + test; }
};

// Contiguous ranges: [0,train) -> train, [train,train+val) -> val, rest test.
std::string assign_split(int id, const SplitSizes& sizes);

SplitSizes default_split_sizes(int count);

}  // namespace profilebench
