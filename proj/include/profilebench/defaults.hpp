#pragma once

// Central registry of the pipeline's default constants. Every value here is
// part of the documented generation/evaluation configuration and is pinned by
// the config snapshot test; change them only together with the docs.

namespace profilebench::defaults {

// Generation camera: fixed perspective, model units, vertical field of view.
inline constexpr double kCameraDistance = 0.8;
inline constexpr double kCameraFovDeg = 20.0;
inline constexpr double kCameraNear = 0.05;
inline constexpr double kCameraFar = 5.0;

// Raster resolutions: geometry renders and per-vertex visibility.
inline constexpr int kRenderResolution = 1024;
inline constexpr int kVisibilityResolution = 256;

// Parameter sampling: clipped Gaussian for shape and non-yaw pose, uniform yaw.
inline constexpr double kSampleSigma = 0.7;
inline constexpr double kSampleClip = 2.0;
inline constexpr double kYawMinDeg = 85.0;
inline constexpr double kYawMaxDeg = 95.0;
inline constexpr int kShapeDim = 300;
inline constexpr int kPoseDim = 5;  // 2 non-yaw global + 3 neck scalars

// Dataset split proportions (train : val : test).
inline constexpr int kSplitTrain = 8;
inline constexpr int kSplitVal = 1;
inline constexpr int kSplitTest = 1;

// Supervision weights (parameter, 3D landmark, visible-jawline terms).
inline constexpr double kWeightParam = 1.0;
inline constexpr double kWeightLm3d = 100.0;
inline constexpr double kWeightJaw = 10.0;

// Landmark convention: 68 total, the first 17 are contour points and are
// excluded from the 3D landmark loss, leaving 51 static landmarks.
inline constexpr int kLandmarkCount = 68;
inline constexpr int kContourLandmarkCount = 17;
inline constexpr int kStaticLandmarkCount = 51;

// Jawline band size (chin-to-ear vertex set supplied by the model asset).
inline constexpr int kJawlineCount = 65;

// Geometry/appearance consistency check: negative-control shift and the
// coverage radius reported next to the mean boundary-to-edge distance.
inline constexpr int kControlShiftX = 16;
inline constexpr int kControlShiftY = 0;
inline constexpr double kCoverageRadiusPx = 2.0;
inline constexpr double kSobelThreshold = 0.25;
inline constexpr double kBandWidthPx = 8.0;
inline constexpr int kConsistencyResolution = 512;

// Conditioning export: diffusion sampler settings written to prompt files.
inline constexpr int kDiffusionSteps = 25;
inline constexpr double kDiffusionGuidance = 7.5;
inline constexpr double kCondScaleDepth = 0.7;
inline constexpr double kCondScaleNormal = 0.4;

}  // namespace profilebench::defaults
