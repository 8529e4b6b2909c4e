#include "profilebench/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "raster IO assumes a little-endian host");

namespace profilebench {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& what, const std::string& path) {
  throw std::runtime_error(what + ": " + path);
}

}  // namespace

void write_png(const std::string& path, const Image<std::uint8_t>& img) {
  if (img.channels != 1 && img.channels != 3) {
    throw std::invalid_argument("write_png: 1 or 3 channels required");
  }
  if (img.empty()) throw std::invalid_argument("write_png: empty image");

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail("write_png: cannot open", path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail("write_png: init failure", path);
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail("write_png: libpng error", path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) {
    rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(
        img.data.data() + static_cast<std::size_t>(y) * img.width * img.channels);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image<std::uint8_t> read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail("read_png: cannot open", path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail("read_png: init failure", path);
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail("read_png: libpng error", path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  // Normalize everything to 8-bit gray or RGB.
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_packing(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY &&
      png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int ch = static_cast<int>(png_get_channels(png, info));
  if (ch != 1 && ch != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail("read_png: unsupported channel count", path);
  }
  Image<std::uint8_t> img(w, h, ch);
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) {
    rows[static_cast<std::size_t>(y)] =
        img.data.data() + static_cast<std::size_t>(y) * w * ch;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_mask_png(const std::string& path, const Mask& mask) {
  Image<std::uint8_t> img(mask.width, mask.height, 1);
  for (std::size_t i = 0; i < mask.data.size(); ++i) img.data[i] = mask.data[i] ? 255 : 0;
  write_png(path, img);
}

Mask read_mask_png(const std::string& path) {
  const Image<std::uint8_t> img = read_png(path);
  if (img.channels != 1) fail("read_mask_png: mask must be grayscale", path);
  Mask mask(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i) mask.data[i] = img.data[i] >= 128 ? 1 : 0;
  return mask;
}

void write_normal_png(const std::string& path, const std::vector<double>& normals,
                      int width, int height) {
  if (normals.size() != static_cast<std::size_t>(width) * height * 3) {
    throw std::invalid_argument("write_normal_png: size mismatch");
  }
  Image<std::uint8_t> img(width, height, 3);
  for (std::size_t i = 0; i < normals.size(); ++i) {
    const double v = (normals[i] + 1.0) * 0.5 * 255.0;
    img.data[i] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
  }
  write_png(path, img);
}

void write_pfm(const std::string& path, const Image<float>& img) {
  if (img.channels != 1) throw std::invalid_argument("write_pfm: grayscale only");
  std::ofstream f(path, std::ios::binary);
  if (!f) fail("write_pfm: cannot open", path);
  f << "Pf\n" << img.width << " " << img.height << "\n-1.0\n";
  for (int y = img.height - 1; y >= 0; --y) {
    f.write(reinterpret_cast<const char*>(img.data.data() +
                                          static_cast<std::size_t>(y) * img.width),
            static_cast<std::streamsize>(sizeof(float) * img.width));
  }
  if (!f) fail("write_pfm: short write", path);
}

Image<float> read_pfm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("read_pfm: cannot open", path);
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  f >> magic >> w >> h >> scale;
  if (magic != "Pf" || w < 1 || h < 1) fail("read_pfm: bad header", path);
  if (scale >= 0.0) fail("read_pfm: big-endian data unsupported", path);
  f.get();  // single whitespace after the scale line
  Image<float> img(w, h);
  for (int y = h - 1; y >= 0; --y) {
    f.read(reinterpret_cast<char*>(img.data.data() + static_cast<std::size_t>(y) * w),
           static_cast<std::streamsize>(sizeof(float) * w));
  }
  if (!f) fail("read_pfm: short read", path);
  return img;
}

namespace {

template <typename T>
void write_pod(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void write_face_id_raster(const std::string& path, const std::vector<int>& face_id,
                          int width, int height) {
  if (face_id.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("write_face_id_raster: size mismatch");
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail("write_face_id_raster: cannot open", path);
  f.write("PBFI", 4);
  write_pod(f, static_cast<std::int32_t>(width));
  write_pod(f, static_cast<std::int32_t>(height));
  for (int id : face_id) write_pod(f, static_cast<std::int32_t>(id));
  if (!f) fail("write_face_id_raster: short write", path);
}

std::vector<int> read_face_id_raster(const std::string& path, int* width, int* height) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("read_face_id_raster: cannot open", path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "PBFI", 4) != 0) fail("read_face_id_raster: bad magic", path);
  const auto w = read_pod<std::int32_t>(f);
  const auto h = read_pod<std::int32_t>(f);
  if (w < 1 || h < 1) fail("read_face_id_raster: bad dimensions", path);
  std::vector<int> ids(static_cast<std::size_t>(w) * h);
  for (auto& id : ids) id = read_pod<std::int32_t>(f);
  if (!f) fail("read_face_id_raster: short read", path);
  if (width) *width = w;
  if (height) *height = h;
  return ids;
}

void write_visibility(const std::string& path, const std::vector<std::uint8_t>& visible,
                      int resolution) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail("write_visibility: cannot open", path);
  f.write("PBVM", 4);
  write_pod(f, static_cast<std::uint32_t>(visible.size()));
  write_pod(f, static_cast<std::uint32_t>(resolution));
  f.write(reinterpret_cast<const char*>(visible.data()),
          static_cast<std::streamsize>(visible.size()));
  if (!f) fail("write_visibility: short write", path);
}

std::vector<std::uint8_t> read_visibility(const std::string& path, int* resolution) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("read_visibility: cannot open", path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "PBVM", 4) != 0) fail("read_visibility: bad magic", path);
  const auto n = read_pod<std::uint32_t>(f);
  const auto res = read_pod<std::uint32_t>(f);
  std::vector<std::uint8_t> visible(n);
  f.read(reinterpret_cast<char*>(visible.data()), static_cast<std::streamsize>(n));
  if (!f) fail("read_visibility: short read", path);
  if (resolution) *resolution = static_cast<int>(res);
  return visible;
}

}  // namespace profilebench
