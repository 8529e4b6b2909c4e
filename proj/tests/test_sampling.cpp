#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "profilebench/rng.hpp"
#include "profilebench/sampling.hpp"
#include "support.hpp"

using namespace profilebench;
namespace ts = profilebench::testsupport;

TEST_CASE("rng streams are deterministic and independent") {
  Rng a = Rng::from_stream(42, 7);
  Rng b = Rng::from_stream(42, 7);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c = Rng::from_stream(42, 8);
  int same = 0;
  Rng a2 = Rng::from_stream(42, 7);
  for (int i = 0; i < 64; ++i) same += a2.next_u64() == c.next_u64();
  CHECK(same == 0);
}

TEST_CASE("uniform stays in the half-open unit interval") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("truncated normal rejection never leaks past the clip") {
  Rng rng(2);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.truncated_normal(0.7, 2.0);
    CHECK(x >= -2.0);
    CHECK(x <= 2.0);
  }
}

TEST_CASE("box-muller normals have the right first two moments") {
  Rng rng(3);
  const int n = 50000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("sample_record is a pure function of base seed and id") {
  SampleSpec spec;
  spec.base_seed = 42;
  spec.shape_dim = 10;
  const SampleRecord a = sample_record(spec, 7);
  const SampleRecord b = sample_record(spec, 7);
  CHECK(a.seed == b.seed);
  CHECK(a.yaw_deg == b.yaw_deg);
  CHECK(a.beta.beta == b.beta.beta);
  CHECK(a.theta.global_rotation == b.theta.global_rotation);
  CHECK(a.pose_scalars == b.pose_scalars);

  const SampleRecord c = sample_record(spec, 8);
  CHECK(a.seed != c.seed);
  CHECK(a.yaw_deg != c.yaw_deg);
}

TEST_CASE("ten thousand records respect the clip and yaw bounds") {
  SampleSpec spec;  // paper defaults: sigma 0.7, clip 2, yaw 85..95
  spec.shape_dim = 12;
  spec.base_seed = 100;
  for (int id = 0; id < 10000; ++id) {
    const SampleRecord rec = sample_record(spec, id);
    CHECK(rec.yaw_deg >= 85.0);
    CHECK(rec.yaw_deg <= 95.0);
    CHECK(rec.beta.beta.minCoeff() >= -2.0);
    CHECK(rec.beta.beta.maxCoeff() <= 2.0);
    for (double s : rec.pose_scalars) {
      CHECK(s >= -2.0);
      CHECK(s <= 2.0);
    }
  }
}

TEST_CASE("global rotation composes yaw first, then the sampled tilt") {
  SampleSpec spec;
  spec.shape_dim = 2;
  spec.base_seed = 5;
  for (int id = 0; id < 25; ++id) {
    const SampleRecord rec = sample_record(spec, id);
    const Mat3 expected = rodrigues(Vec3(rec.pose_scalars[0], 0.0, rec.pose_scalars[1])) *
                          rotation_about_y(deg_to_rad(rec.yaw_deg));
    CHECK((rodrigues(rec.theta.global_rotation) - expected).norm() < 1e-12);
    for (const Vec3& aa : rec.theta.articulated_rotations) CHECK(aa.norm() < kPi);
  }
}

TEST_CASE("neck rotation repeats the tail of the pose scalars") {
  SampleSpec spec;
  spec.shape_dim = 2;
  spec.base_seed = 17;
  const SampleRecord rec = sample_record(spec, 3);
  REQUIRE(rec.pose_scalars.size() == 5);
  REQUIRE(rec.theta.articulated_rotations.size() == 1);
  const Vec3& neck = rec.theta.articulated_rotations[0];
  CHECK(neck.x() == rec.pose_scalars[2]);
  CHECK(neck.y() == rec.pose_scalars[3]);
  CHECK(neck.z() == rec.pose_scalars[4]);
}

TEST_CASE("yaw empirical distribution is uniform on [85, 95]") {
  SampleSpec spec;
  spec.shape_dim = 1;
  spec.pose_dim = 2;
  spec.base_seed = 1234;
  const int n = 10000;
  std::vector<double> yaw(n);
  for (int id = 0; id < n; ++id) yaw[static_cast<std::size_t>(id)] = sample_record(spec, id).yaw_deg;
  std::sort(yaw.begin(), yaw.end());

  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = (yaw[static_cast<std::size_t>(i)] - 85.0) / 10.0;
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - cdf));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("truncated normal std matches the closed form") {
  Rng rng(77);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.truncated_normal(0.7, 2.0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  const double expect = ts::truncated_normal_std(0.7, 2.0);
  CHECK(expect < 0.7);  // truncation shrinks the spread
  CHECK(std::abs(sd / expect - 1.0) < 0.01);
}

TEST_CASE("split assignment uses contiguous id ranges") {
  const SplitSizes paper{80000, 10000, 10000};
  CHECK(assign_split(0, paper) == "train");
  CHECK(assign_split(79999, paper) == "train");
  CHECK(assign_split(80000, paper) == "val");
  CHECK(assign_split(89999, paper) == "val");
  CHECK(assign_split(90000, paper) == "test");
  CHECK(assign_split(99999, paper) == "test");

  CHECK_THROWS_AS(assign_split(3, SplitSizes{1, 1, 1}), std::out_of_range);
  CHECK_THROWS_AS(assign_split(-1, paper), std::out_of_range);
}

TEST_CASE("default split sizes scale the 8:1:1 proportions") {
  const SplitSizes s100 = default_split_sizes(100);
  CHECK(s100.train == 80);
  CHECK(s100.val == 10);
  CHECK(s100.test == 10);

  const SplitSizes s10 = default_split_sizes(10);
  CHECK(s10.train == 8);
  CHECK(s10.val == 1);
  CHECK(s10.test == 1);

  // Remainders land in the test split, totals always preserved.
  for (int count : {1, 3, 7, 99, 1001}) {
    const SplitSizes s = default_split_sizes(count);
    CHECK(s.total() == count);
    CHECK(s.train >= 0);
    CHECK(s.val >= 0);
    CHECK(s.test >= 0);
  }
}

TEST_CASE("sample spec validation rejects degenerate settings") {
  SampleSpec spec;
  spec.sigma = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec = SampleSpec{};
  spec.clip = -1.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec = SampleSpec{};
  spec.yaw_min_deg = 95.0;
  spec.yaw_max_deg = 85.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec = SampleSpec{};
  spec.pose_dim = 1;  // fewer scalars than the global tilt needs
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  CHECK_THROWS_AS(sample_record(SampleSpec{}, -1), std::invalid_argument);
}
