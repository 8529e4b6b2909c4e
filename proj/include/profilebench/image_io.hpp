#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "profilebench/image.hpp"

namespace profilebench {

// 8-bit PNG, 1 or 3 channels.
void write_png(const std::string& path, const Image<std::uint8_t>& img);
Image<std::uint8_t> read_png(const std::string& path);

// Masks stored as 8-bit gray {0,255}; reading thresholds at 128.
void write_mask_png(const std::string& path, const Mask& mask);
Mask read_mask_png(const std::string& path);

// Normal map encoded per channel as round((n+1)/2*255); normals is H*W*3.
void write_normal_png(const std::string& path, const std::vector<double>& normals,
                      int width, int height);

// Grayscale PFM ("Pf"), float32, bottom-up rows, scale -1 (little-endian).
void write_pfm(const std::string& path, const Image<float>& img);
Image<float> read_pfm(const std::string& path);

// Face-id raster: "PBFI", int32 width/height, row-major int32 ids.
void write_face_id_raster(const std::string& path, const std::vector<int>& face_id,
                          int width, int height);
std::vector<int> read_face_id_raster(const std::string& path, int* width, int* height);

// Per-vertex visibility: "PBVM", uint32 count, uint32 resolution, one byte each.
void write_visibility(const std::string& path, const std::vector<std::uint8_t>& visible,
                      int resolution);
std::vector<std::uint8_t> read_visibility(const std::string& path, int* resolution);

}  // namespace profilebench
