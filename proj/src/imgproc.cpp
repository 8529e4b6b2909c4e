#include "profilebench/imgproc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace profilebench {

namespace {

// 1D squared-distance transform via the lower envelope of parabolas.
void edt_1d(const double* f, double* d, int n, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kEdtNoSeed;
  z[1] = kEdtNoSeed;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + static_cast<double>(q) * q) -
                (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
               (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + static_cast<double>(q) * q) -
           (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
          (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kEdtNoSeed;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

Image<double> squared_edt(const Mask& mask) {
  const int w = mask.width, h = mask.height;
  Image<double> dist(w, h);
  const int n_max = std::max(w, h);

  // Column pass first, then rows over the column results.
  std::vector<double> f(static_cast<std::size_t>(n_max));
  std::vector<double> d(static_cast<std::size_t>(n_max));
  std::vector<int> v(static_cast<std::size_t>(n_max));
  std::vector<double> z(static_cast<std::size_t>(n_max) + 1);

#pragma omp parallel for schedule(static) firstprivate(f, d, v, z)
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[static_cast<std::size_t>(y)] = mask.at(x, y) ? 0.0 : kEdtNoSeed;
    edt_1d(f.data(), d.data(), h, v.data(), z.data());
    for (int y = 0; y < h; ++y) dist.at(x, y) = d[static_cast<std::size_t>(y)];
  }

#pragma omp parallel for schedule(static) firstprivate(f, d, v, z)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = dist.at(x, y);
    edt_1d(f.data(), d.data(), w, v.data(), z.data());
    for (int x = 0; x < w; ++x) dist.at(x, y) = d[static_cast<std::size_t>(x)];
  }
  return dist;
}

Mask erode_cross(const Mask& mask) {
  const int w = mask.width, h = mask.height;
  Mask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool keep = mask.at(x, y) &&
                        (x > 0 && mask.at(x - 1, y)) && (x + 1 < w && mask.at(x + 1, y)) &&
                        (y > 0 && mask.at(x, y - 1)) && (y + 1 < h && mask.at(x, y + 1));
      out.at(x, y) = keep ? 1 : 0;
    }
  }
  return out;
}

Mask mask_boundary(const Mask& mask) {
  const Mask eroded = erode_cross(mask);
  Mask out(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    out.data[i] = (mask.data[i] && !eroded.data[i]) ? 1 : 0;
  }
  return out;
}

Mask dilate_by_distance(const Mask& mask, double radius) {
  if (radius < 0.0) throw std::invalid_argument("dilate_by_distance: negative radius");
  const Image<double> d2 = squared_edt(mask);
  Mask out(mask.width, mask.height);
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = d2.data[i] <= r2 ? 1 : 0;
  }
  return out;
}

Mask resize_nearest(const Mask& mask, int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("resize_nearest: empty target");
  Mask out(width, height);
  for (int y = 0; y < height; ++y) {
    int sy = static_cast<int>((y + 0.5) * mask.height / height);
    sy = std::min(sy, mask.height - 1);
    for (int x = 0; x < width; ++x) {
      int sx = static_cast<int>((x + 0.5) * mask.width / width);
      sx = std::min(sx, mask.width - 1);
      out.at(x, y) = mask.at(sx, sy);
    }
  }
  return out;
}

Mask translate(const Mask& mask, int dx, int dy) {
  Mask out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y) {
    const int sy = y - dy;
    if (sy < 0 || sy >= mask.height) continue;
    for (int x = 0; x < mask.width; ++x) {
      const int sx = x - dx;
      if (sx < 0 || sx >= mask.width) continue;
      out.at(x, y) = mask.at(sx, sy);
    }
  }
  return out;
}

Image<double> to_gray(const Image<std::uint8_t>& img) {
  Image<double> out(img.width, img.height);
  if (img.channels == 1) {
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = img.data[i] / 255.0;
  } else if (img.channels == 3) {
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      const double r = img.data[i * 3 + 0], g = img.data[i * 3 + 1], b = img.data[i * 3 + 2];
      out.data[i] = (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
    }
  } else {
    throw std::invalid_argument("to_gray: expected 1 or 3 channels");
  }
  return out;
}

Image<double> sobel_magnitude(const Image<double>& gray) {
  if (gray.channels != 1) throw std::invalid_argument("sobel_magnitude: single channel only");
  const int w = gray.width, h = gray.height;
  Image<double> out(w, h);
  auto sample = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return gray.at(x, y);
  };
  // Max response of either kernel is 4 on a unit step; the magnitude of a
  // diagonal step reaches 4*sqrt(2), which normalizes to 1.
  const double norm = 4.0 * std::sqrt(2.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double tl = sample(x - 1, y - 1), tc = sample(x, y - 1), tr = sample(x + 1, y - 1);
      const double ml = sample(x - 1, y), mr = sample(x + 1, y);
      const double bl = sample(x - 1, y + 1), bc = sample(x, y + 1), br = sample(x + 1, y + 1);
      const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
      const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
      out.at(x, y) = std::sqrt(gx * gx + gy * gy) / norm;
    }
  }
  return out;
}

Mask sobel_edges(const Image<double>& gray, double threshold) {
  const Image<double> mag = sobel_magnitude(gray);
  Mask out(gray.width, gray.height);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = mag.data[i] > threshold ? 1 : 0;
  }
  return out;
}

}  // namespace profilebench
