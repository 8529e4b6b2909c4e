#pragma once

#include "profilebench/image.hpp"

namespace profilebench {

// Exact squared Euclidean distance to the nearest nonzero pixel (two-pass
// lower-envelope transform). Squared distances on a pixel grid are integers,
// so results are exact and sqrt of them matches brute-force search bit for
// bit. A fully empty mask yields kEdtNoSeed everywhere.
inline constexpr double kEdtNoSeed = 1e20;
Image<double> squared_edt(const Mask& mask);

// 3x3 cross erosion; pixels outside the image count as background, so
// foreground touching the frame edge erodes there.
Mask erode_cross(const Mask& mask);

// Morphological gradient: mask minus its erosion.
Mask mask_boundary(const Mask& mask);

// All pixels within Euclidean distance <= radius of a nonzero pixel.
Mask dilate_by_distance(const Mask& mask, double radius);

Mask resize_nearest(const Mask& mask, int width, int height);

// Shifts content by (dx, dy); pixels moved in from outside are background.
Mask translate(const Mask& mask, int dx, int dy);

// Grayscale in [0,1] from 8-bit mono or RGB (Rec.601 luma).
Image<double> to_gray(const Image<std::uint8_t>& img);

// 3x3 Sobel gradient magnitude with replicate padding, normalized by the
// kernel's maximal response (4*sqrt(2) per unit step).
Image<double> sobel_magnitude(const Image<double>& gray);

Mask sobel_edges(const Image<double>& gray, double threshold);

}  // namespace profilebench
