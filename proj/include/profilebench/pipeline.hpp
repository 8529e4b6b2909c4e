#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "profilebench/camera.hpp"
#include "profilebench/consistency.hpp"
#include "profilebench/manifest.hpp"
#include "profilebench/metrics.hpp"
#include "profilebench/model.hpp"
#include "profilebench/sampling.hpp"
#include "profilebench/stats.hpp"
#include "profilebench/supervision.hpp"

namespace profilebench {

// Parameter file contents for one sample.
struct ParamsFile {
  int id = 0;
  std::uint64_t seed = 0;
  double yaw_deg = 0.0;
  ShapeParams beta;
  PoseParams theta;
  std::vector<double> pose_scalars;
  std::string split;
};

void write_params_json(const std::string& path, const ParamsFile& params);
ParamsFile read_params_json(const std::string& path);

void write_landmarks3d_json(const std::string& path, const LandmarkSet3D& landmarks);
LandmarkSet3D read_landmarks3d_json(const std::string& path);

void write_landmarks2d_json(const std::string& path, const Projection& projection,
                            const std::vector<std::string>& labels);

// Per-row failures are isolated: the run continues and failed ids are
// reported with reasons.
struct BatchResult {
  int n_ok = 0;
  std::vector<std::pair<int, std::string>> failures;

  bool all_ok() const { return failures.empty(); }
};

// Draws `count` records, writes params/<id>.json files and manifest.jsonl
// with contiguous split ranges scaled 8:1:1. When an asset is given its
// content hash is pinned in the header and shape_dim must agree.
Manifest run_sample(const SampleSpec& spec, int count, const std::string& out_dir,
                    const ModelAsset* asset = nullptr);

struct RenderConfig {
  Camera camera;
  int visibility_resolution = defaults::kVisibilityResolution;
};

// Decodes every manifest row and writes depth (PFM), normals, silhouette,
// face ids, per-vertex visibility and 2D/3D landmarks next to the manifest,
// then rewrites the manifest with the new paths.
BatchResult run_render(const std::string& manifest_path, const ModelAsset& asset,
                       const RenderConfig& config);

// Writes one OBJ mesh and landmark file per row under out_dir.
BatchResult run_decode(const std::string& manifest_path, const ModelAsset& asset,
                       const std::string& out_dir);

struct PromptConfig {
  std::string positive =
      "photorealistic side-profile portrait photo of a person, studio lighting, "
      "plain background, sharp focus";
  std::string negative =
      "cartoon, painting, low quality, blurry, frontal view, extra limbs";
  int steps = defaults::kDiffusionSteps;
  double guidance = defaults::kDiffusionGuidance;
  double scale_depth = defaults::kCondScaleDepth;
  double scale_normal = defaults::kCondScaleNormal;
};

// One directory per sample with depth.png (8-bit, near maps to white and
// background to black), normal.png and prompt.json carrying the generation
// settings and the per-sample seed.
BatchResult run_export_conditioning(const std::string& manifest_path,
                                    const std::string& out_dir,
                                    const PromptConfig& prompt);

enum class Protocol { kAligned, kRaw };

struct EvaluateConfig {
  Protocol protocol = Protocol::kAligned;
  std::string predictions_dir;  // sample_<id>.obj or sample_<id>.json inside
  std::string out_dir;
  int silhouette_resolution = 256;
  int visibility_resolution = defaults::kVisibilityResolution;
  bool with_scale = false;
};

struct EvaluateOutput {
  BatchResult batch;
  std::vector<MetricsReport> per_sample;  // indexed like manifest rows
  nlohmann::json summary;
};

EvaluateOutput run_evaluate(const std::string& manifest_path, const ModelAsset& asset,
                            const EvaluateConfig& config);

struct ConsistencyRunOutput {
  BatchResult batch;
  int n_skipped = 0;  // rows without an rgb render
  std::vector<std::optional<ConsistencyReport>> per_sample;
};

// Runs the geometry-appearance check on every row that has an RGB path and
// writes a CSV plus an aggregate JSON.
ConsistencyRunOutput run_consistency(const std::string& manifest_path,
                                     const ConsistencyConfig& config,
                                     const std::string& out_dir);

struct FitRunOutput {
  BatchResult batch;
  std::vector<double> rms;  // landmark RMS per fitted row
};

// Fits shape and pose to each row's stored 3D landmarks from a zero
// initialization and writes fitted params plus a CSV report.
FitRunOutput run_fit(const std::string& manifest_path, const ModelAsset& asset,
                     const std::string& out_dir, const FitOptions& options = {});

struct PairedStats {
  int n = 0;
  double mean_diff = 0.0;
  double median_diff = 0.0;
  std::pair<double, double> mean_ci;
  std::pair<double, double> median_ci;
  double wilcoxon_p = 1.0;
  double better_fraction = 0.0;  // fraction of pairs where a < b
};

PairedStats paired_stats(const std::vector<double>& a, const std::vector<double>& b,
                         int n_boot, double level, std::uint64_t seed);

// Reads a named numeric column from a CSV written by this tool; blank cells
// are rejected (undefined metrics cannot enter paired statistics).
std::vector<double> read_csv_column(const std::string& path, const std::string& column);

nlohmann::json paired_stats_json(const PairedStats& stats, int n_boot, double level,
                                 std::uint64_t seed);

}  // namespace profilebench
