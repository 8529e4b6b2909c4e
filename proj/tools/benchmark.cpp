// Times the parallel kernels against their serial reference counterparts and
// verifies both sides agree while it is at it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "profilebench/imgproc.hpp"
#include "profilebench/raster.hpp"
#include "profilebench/rng.hpp"
#include "reference.hpp"

namespace pb = profilebench;

namespace {

template <typename F>
double time_ms(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const std::string& name, double parallel_ms, double serial_ms, bool equal) {
  std::printf("%-28s %10.2f ms %10.2f ms %8.2fx  %s\n", name.c_str(), parallel_ms, serial_ms,
              serial_ms / parallel_ms, equal ? "outputs match" : "OUTPUTS DIFFER");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both columns run serially\n");
#endif
  std::printf("%-28s %13s %13s %9s\n", "kernel", "parallel", "serial", "speedup");

  const pb::ModelAsset asset = pb::make_toy_model(7, 3000, 10);
  pb::Rng rng(11);
  pb::ShapeParams beta = pb::ShapeParams::zeros(asset.shape_dim());
  for (int s = 0; s < asset.shape_dim(); ++s) beta.beta[s] = rng.truncated_normal(0.7, 2.0);
  pb::PoseParams theta = pb::PoseParams::zeros(asset.joint_count());
  theta.global_rotation = pb::Vec3(0.0, 1.2, 0.0);
  const pb::Mesh mesh = pb::decode(asset, beta, theta).mesh;

  const pb::Camera camera = pb::Camera{}.with_resolution(512);
  pb::RasterBuffers par_raster, ser_raster;
  const double t_raster = time_ms(3, [&] { par_raster = pb::rasterize(camera, mesh); });
  const double t_raster_ref =
      time_ms(1, [&] { ser_raster = pb::refimpl::rasterize_reference(camera, mesh); });
  const bool raster_equal = par_raster.face_id == ser_raster.face_id &&
                            par_raster.depth == ser_raster.depth &&
                            par_raster.silhouette == ser_raster.silhouette;
  row("rasterize 512^2", t_raster, t_raster_ref, raster_equal);

  pb::Mask mask(1024, 1024);
  for (int i = 0; i < 4000; ++i) {
    const int x = static_cast<int>(rng.uniform_int(1024));
    const int y = static_cast<int>(rng.uniform_int(1024));
    mask.at(x, y) = 1;
  }
  pb::Image<double> par_edt, ser_edt;
  const double t_edt = time_ms(3, [&] { par_edt = pb::squared_edt(mask); });
  const double t_edt_ref = time_ms(3, [&] { ser_edt = pb::refimpl::squared_edt_serial(mask); });
  row("squared_edt 1024^2", t_edt, t_edt_ref, par_edt.data == ser_edt.data);

  pb::Image<double> gray(1024, 1024);
  for (auto& v : gray.data) v = rng.uniform();
  pb::Image<double> par_sobel, ser_sobel;
  const double t_sobel = time_ms(3, [&] { par_sobel = pb::sobel_magnitude(gray); });
  const double t_sobel_ref =
      time_ms(3, [&] { ser_sobel = pb::refimpl::sobel_magnitude_serial(gray); });
  row("sobel_magnitude 1024^2", t_sobel, t_sobel_ref, par_sobel.data == ser_sobel.data);

  const bool all_equal = raster_equal && par_edt.data == ser_edt.data &&
                         par_sobel.data == ser_sobel.data;
  return all_equal ? 0 : 1;
}
