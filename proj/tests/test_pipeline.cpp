#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "profilebench/image_io.hpp"
#include "profilebench/mesh_io.hpp"
#include "profilebench/model.hpp"
#include "profilebench/pipeline.hpp"
#include "profilebench/raster.hpp"
#include "support.hpp"

using namespace profilebench;
namespace ts = profilebench::testsupport;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SampleSpec toy_spec(std::uint64_t base_seed = 11) {
  SampleSpec spec;
  spec.shape_dim = 8;  // the cached toy asset has 8 shape components
  spec.pose_dim = 5;
  spec.base_seed = base_seed;
  return spec;
}

// Sample `count` records against the toy asset and render them small.
std::string small_pipeline(const std::string& tag, int count, int resolution = 160,
                           int visibility_resolution = 128) {
  const ModelAsset& asset = ts::toy_asset();
  const std::string dir = ts::temp_dir(tag);
  run_sample(toy_spec(), count, dir, &asset);
  RenderConfig rc;
  rc.camera = rc.camera.with_resolution(resolution);
  rc.visibility_resolution = visibility_resolution;
  const BatchResult r = run_render(dir + "/manifest.jsonl", asset, rc);
  REQUIRE(r.all_ok());
  return dir;
}

}  // namespace

TEST_CASE("sampling run writes deterministic manifests with contiguous splits") {
  const ModelAsset& asset = ts::toy_asset();
  const std::string dir_a = ts::temp_dir("pipe_sample_a");
  const std::string dir_b = ts::temp_dir("pipe_sample_b");

  const Manifest ma = run_sample(toy_spec(), 10, dir_a, &asset);
  const Manifest mb = run_sample(toy_spec(), 10, dir_b, &asset);
  ma.validate();

  CHECK(read_file(dir_a + "/manifest.jsonl") == read_file(dir_b + "/manifest.jsonl"));
  for (int id : {0, 3, 9}) {
    const std::string rel = ma.rows[static_cast<std::size_t>(id)].params;
    CHECK(read_file(dir_a + "/" + rel) == read_file(dir_b + "/" + rel));
  }

  REQUIRE(ma.rows.size() == 10);
  for (int id = 0; id < 10; ++id) {
    CHECK(ma.rows[static_cast<std::size_t>(id)].id == id);
    const std::string expected = id < 8 ? "train" : (id == 8 ? "val" : "test");
    CHECK(ma.rows[static_cast<std::size_t>(id)].split == expected);
  }

  CHECK(ma.header.at("format").get<std::string>() == "profilebench-manifest");
  CHECK(ma.header.at("count").get<int>() == 10);
  CHECK(ma.header.at("asset_hash").get<std::string>() == asset.content_hash());
  CHECK(ma.header.at("sample_spec").at("shape_dim").get<int>() == 8);
  CHECK(ma.header.at("splits").at("train").get<int>() == 8);
  CHECK(ma.header.at("splits").at("val").get<int>() == 1);
  CHECK(ma.header.at("splits").at("test").get<int>() == 1);

  // Params files round-trip through the reader with the drawn ranges intact.
  const ParamsFile p = read_params_json(dir_a + "/" + ma.rows[3].params);
  CHECK(p.id == 3);
  CHECK(p.split == "train");
  CHECK(p.beta.dim() == 8);
  CHECK(p.theta.articulated_rotations.size() == 1);
  CHECK(p.pose_scalars.size() == 5);
  CHECK(p.yaw_deg >= 85.0);
  CHECK(p.yaw_deg <= 95.0);
  CHECK(p.seed == ma.rows[3].seed);

  ts::remove_tree(dir_a);
  ts::remove_tree(dir_b);
}

TEST_CASE("sampling run validates count and asset compatibility") {
  const ModelAsset& asset = ts::toy_asset();
  const std::string dir = ts::temp_dir("pipe_sample_bad");

  CHECK_THROWS_WITH_AS(run_sample(toy_spec(), 0, dir, &asset),
                       doctest::Contains("positive"), std::invalid_argument);

  SampleSpec wrong = toy_spec();
  wrong.shape_dim = 7;
  CHECK_THROWS_WITH_AS(run_sample(wrong, 4, dir, &asset), doctest::Contains("shape_dim"),
                       std::invalid_argument);

  ts::remove_tree(dir);
}

TEST_CASE("render run populates rows, re-renders identically and keeps manifest closure") {
  const ModelAsset& asset = ts::toy_asset();
  const std::string dir = small_pipeline("pipe_render", 3);
  const std::string manifest_path = dir + "/manifest.jsonl";

  Manifest m = read_manifest(manifest_path);
  m.validate();
  CHECK(m.header.at("asset_hash").get<std::string>() == asset.content_hash());
  CHECK(m.header.at("visibility_resolution").get<int>() == 128);
  CHECK(m.header.at("camera").at("width").get<int>() == 160);

  // Every path the rewritten manifest references exists on disk.
  for (const ManifestRow& row : m.rows) {
    for (const std::string& rel : {row.params, row.depth, row.normal, row.silhouette,
                                   row.face_id, row.visibility, row.landmarks_2d,
                                   row.landmarks_3d}) {
      REQUIRE(!rel.empty());
      CHECK(fs::exists(dir + "/" + rel));
    }
  }

  // The silhouette shows the head without filling the frame.
  const Mask sil = read_mask_png(dir + "/" + m.rows[0].silhouette);
  const std::size_t on = count_nonzero(sil);
  CHECK(on > 0);
  CHECK(on < static_cast<std::size_t>(sil.width) * static_cast<std::size_t>(sil.height));

  // Stored 3D landmarks equal the decoder output for the row's parameters.
  const ParamsFile p = read_params_json(dir + "/" + m.rows[0].params);
  const DecodeResult decoded = decode(asset, p.beta, p.theta);
  const LandmarkSet3D stored = read_landmarks3d_json(dir + "/" + m.rows[0].landmarks_3d);
  REQUIRE(stored.count() == decoded.landmarks.count());
  CHECK((stored.points - decoded.landmarks.points).cwiseAbs().maxCoeff() == 0.0);

  // Re-rendering is byte-identical: manifest and raster outputs.
  const std::string manifest_before = read_file(manifest_path);
  const std::string depth_before = read_file(dir + "/" + m.rows[1].depth);
  const std::string sil_before = read_file(dir + "/" + m.rows[1].silhouette);
  RenderConfig rc;
  rc.camera = rc.camera.with_resolution(160);
  rc.visibility_resolution = 128;
  const BatchResult again = run_render(manifest_path, asset, rc);
  CHECK(again.all_ok());
  CHECK(read_file(manifest_path) == manifest_before);
  CHECK(read_file(dir + "/" + m.rows[1].depth) == depth_before);
  CHECK(read_file(dir + "/" + m.rows[1].silhouette) == sil_before);

  // A manifest pinned to this asset refuses to render a different one.
  CHECK_THROWS_WITH(run_render(manifest_path, ts::occlusion_fixture_asset(), rc),
                    doctest::Contains("hash mismatch"));

  ts::remove_tree(dir);
}

TEST_CASE("decode run writes meshes that match the decoder output") {
  const ModelAsset& asset = ts::toy_asset();
  const std::string dir = ts::temp_dir("pipe_decode");
  const Manifest m = run_sample(toy_spec(3), 2, dir, &asset);

  const std::string out = dir + "/decoded";
  const BatchResult r = run_decode(dir + "/manifest.jsonl", asset, out);
  CHECK(r.all_ok());
  CHECK(r.n_ok == 2);

  for (const ManifestRow& row : m.rows) {
    const ParamsFile p = read_params_json(dir + "/" + row.params);
    const DecodeResult decoded = decode(asset, p.beta, p.theta);
    std::ostringstream stem;
    stem << out << "/sample_" << std::setw(6) << std::setfill('0') << row.id;
    const Mesh mesh = read_obj(stem.str() + ".obj");
    REQUIRE(mesh.vertex_count() == decoded.mesh.vertex_count());
    // %.17g vertices survive the OBJ round trip bit-exactly.
    CHECK((mesh.vertices - decoded.mesh.vertices).cwiseAbs().maxCoeff() == 0.0);
    CHECK((mesh.faces - asset.faces).cwiseAbs().maxCoeff() == 0);
    CHECK(fs::exists(stem.str() + "_lm3d.json"));
  }

  ts::remove_tree(dir);
}

TEST_CASE("conditioning export writes bundles with the generation settings") {
  const std::string dir = small_pipeline("pipe_cond", 2);
  const Manifest m = read_manifest(dir + "/manifest.jsonl");

  const std::string out = dir + "/conditioning";
  const BatchResult r = run_export_conditioning(dir + "/manifest.jsonl", out, PromptConfig{});
  CHECK(r.all_ok());
  CHECK(r.n_ok == 2);

  const std::string bundle = out + "/sample_000000";
  REQUIRE(fs::exists(bundle + "/depth.png"));
  REQUIRE(fs::exists(bundle + "/normal.png"));
  REQUIRE(fs::exists(bundle + "/prompt.json"));

  const nlohmann::json pj = nlohmann::json::parse(read_file(bundle + "/prompt.json"));
  CHECK(pj.at("steps").get<int>() == 25);
  CHECK(pj.at("guidance_scale").get<double>() == 7.5);
  CHECK(pj.at("seed").get<std::uint64_t>() == m.rows[0].seed);
  CHECK(pj.at("conditioning").at("depth").at("image").get<std::string>() == "depth.png");
  CHECK(pj.at("conditioning").at("depth").at("scale").get<double>() == 0.7);
  CHECK(pj.at("conditioning").at("normal").at("scale").get<double>() == 0.4);
  CHECK(pj.at("depth_encoding").at("near").get<double>() == 0.05);
  CHECK(pj.at("depth_encoding").at("far").get<double>() == 5.0);
  CHECK(!pj.at("prompt").get<std::string>().empty());
  CHECK(!pj.at("negative_prompt").get<std::string>().empty());

  // Background maps to black, the head to a bright band near the camera.
  const Image<std::uint8_t> depth_png = read_png(bundle + "/depth.png");
  CHECK(depth_png.width == 160);
  CHECK(depth_png.at(0, 0, 0) == 0);
  int brightest = 0;
  for (std::uint8_t v : depth_png.data) brightest = std::max(brightest, static_cast<int>(v));
  CHECK(brightest > 180);

  // The normal map is copied verbatim from the render.
  CHECK(read_file(bundle + "/normal.png") == read_file(dir + "/" + m.rows[0].normal));

  ts::remove_tree(dir);
}

TEST_CASE("conditioning export reports unrendered rows as failures") {
  const ModelAsset& asset = ts::toy_asset();
  const std::string dir = ts::temp_dir("pipe_cond_unrendered");
  run_sample(toy_spec(), 3, dir, &asset);

  const BatchResult r =
      run_export_conditioning(dir + "/manifest.jsonl", dir + "/conditioning", PromptConfig{});
  CHECK(r.n_ok == 0);
  REQUIRE(r.failures.size() == 3);
  for (const auto& [id, reason] : r.failures)
    CHECK(reason.find("run render first") != std::string::npos);

  ts::remove_tree(dir);
}

TEST_CASE("evaluate reproduces exact zeros for perfect predictions") {
  const ModelAsset& asset = ts::toy_asset();
  const std::string dir = small_pipeline("pipe_eval_perfect", 3);
  const std::string manifest_path = dir + "/manifest.jsonl";
  const Manifest m = read_manifest(manifest_path);

  // OBJ predictions from the decoder itself.
  const std::string preds_obj = dir + "/preds_obj";
  REQUIRE(run_decode(manifest_path, asset, preds_obj).all_ok());

  EvaluateConfig cfg;
  cfg.protocol = Protocol::kRaw;
  cfg.predictions_dir = preds_obj;
  cfg.out_dir = dir + "/eval_raw";
  cfg.silhouette_resolution = 128;
  cfg.visibility_resolution = 128;

  const EvaluateOutput out = run_evaluate(manifest_path, asset, cfg);
  CHECK(out.batch.all_ok());
  CHECK(out.batch.n_ok == 3);
  for (const MetricsReport& rep : out.per_sample) {
    REQUIRE(rep.e_all.has_value());
    CHECK(*rep.e_all == 0.0);
    CHECK(*rep.e_vis == 0.0);
    CHECK(*rep.iou == 1.0);
    CHECK(*rep.boundary_chamfer == 0.0);
    CHECK(rep.n_vis > 0);
  }

  CHECK(out.summary.at("protocol").get<std::string>() == "raw");
  CHECK(out.summary.at("n_ok").get<int>() == 3);
  CHECK(out.summary.at("metrics").at("e_all").at("mean").get<double>() == 0.0);
  CHECK(out.summary.at("metrics").at("iou").at("mean").get<double>() == 1.0);

  // Report files exist and the CSV columns parse back.
  REQUIRE(fs::exists(cfg.out_dir + "/evaluation.csv"));
  REQUIRE(fs::exists(cfg.out_dir + "/summary.json"));
  const std::vector<double> e_all = read_csv_column(cfg.out_dir + "/evaluation.csv", "e_all");
  REQUIRE(e_all.size() == 3);
  for (double v : e_all) CHECK(v == 0.0);
  const std::vector<double> iou = read_csv_column(cfg.out_dir + "/evaluation.csv", "iou");
  for (double v : iou) CHECK(v == 1.0);

  // Params-file predictions hit the decoding branch and are equally exact.
  const std::string preds_json = dir + "/preds_json";
  fs::create_directories(preds_json);
  for (const ManifestRow& row : m.rows) {
    const ParamsFile p = read_params_json(dir + "/" + row.params);
    std::ostringstream name;
    name << preds_json << "/sample_" << std::setw(6) << std::setfill('0') << row.id << ".json";
    write_params_json(name.str(), p);
  }
  EvaluateConfig cfg_json = cfg;
  cfg_json.predictions_dir = preds_json;
  cfg_json.out_dir.clear();
  const EvaluateOutput out_json = run_evaluate(manifest_path, asset, cfg_json);
  CHECK(out_json.batch.all_ok());
  for (const MetricsReport& rep : out_json.per_sample) CHECK(*rep.e_all == 0.0);

  ts::remove_tree(dir);
}

TEST_CASE("aligned evaluate removes a rigid motion from the predictions") {
  const ModelAsset& asset = ts::toy_asset();
  const std::string dir = small_pipeline("pipe_eval_aligned", 2);
  const std::string manifest_path = dir + "/manifest.jsonl";
  const Manifest m = read_manifest(manifest_path);

  const std::string preds = dir + "/preds_moved";
  REQUIRE(run_decode(manifest_path, asset, preds).all_ok());

  // Apply one fixed rigid motion to every decoded mesh, in place.
  Rng rng(404);
  Mat3 rot = ts::random_rotation(rng);
  // Keep the motion small enough that the moved head still rasterizes.
  rot = Eigen::AngleAxisd(0.25, Eigen::AngleAxisd(rot).axis()).toRotationMatrix();
  const Vec3 t(0.02, -0.015, 0.01);
  for (const ManifestRow& row : m.rows) {
    std::ostringstream name;
    name << preds << "/sample_" << std::setw(6) << std::setfill('0') << row.id << ".obj";
    Mesh mesh = read_obj(name.str());
    mesh.vertices = (mesh.vertices * rot.transpose()).rowwise() + t.transpose();
    write_obj(name.str(), mesh);
  }

  EvaluateConfig cfg;
  cfg.protocol = Protocol::kAligned;
  cfg.predictions_dir = preds;
  cfg.silhouette_resolution = 128;
  cfg.visibility_resolution = 128;
  const EvaluateOutput aligned = run_evaluate(manifest_path, asset, cfg);
  CHECK(aligned.batch.all_ok());
  for (const MetricsReport& rep : aligned.per_sample) {
    REQUIRE(rep.e_all.has_value());
    CHECK(*rep.e_all < 1e-6);
    CHECK(*rep.e_vis < 1e-6);
    CHECK(*rep.iou > 0.98);
    CHECK(*rep.boundary_chamfer < 0.05);
  }

  // The raw protocol keeps the displacement instead of absorbing it.
  EvaluateConfig raw = cfg;
  raw.protocol = Protocol::kRaw;
  const EvaluateOutput kept = run_evaluate(manifest_path, asset, raw);
  CHECK(kept.batch.all_ok());
  for (const MetricsReport& rep : kept.per_sample) CHECK(*rep.e_all > 1e-3);

  ts::remove_tree(dir);
}

TEST_CASE("evaluate isolates per-row failures and never mutates ground truth") {
  const ModelAsset& asset = ts::toy_asset();
  const std::string dir = small_pipeline("pipe_eval_isolation", 3);
  const std::string manifest_path = dir + "/manifest.jsonl";
  Manifest m = read_manifest(manifest_path);

  const std::string preds = dir + "/preds";
  REQUIRE(run_decode(manifest_path, asset, preds).all_ok());

  EvaluateConfig cfg;
  cfg.protocol = Protocol::kRaw;
  cfg.predictions_dir = preds;
  cfg.silhouette_resolution = 128;
  cfg.visibility_resolution = 128;

  // Snapshot ground-truth bytes, evaluate, and verify nothing moved.
  const std::string manifest_bytes = read_file(manifest_path);
  const std::string depth_bytes = read_file(dir + "/" + m.rows[0].depth);
  const std::string params_bytes = read_file(dir + "/" + m.rows[0].params);
  REQUIRE(run_evaluate(manifest_path, asset, cfg).batch.all_ok());
  CHECK(read_file(manifest_path) == manifest_bytes);
  CHECK(read_file(dir + "/" + m.rows[0].depth) == depth_bytes);
  CHECK(read_file(dir + "/" + m.rows[0].params) == params_bytes);

  // A wrong asset is rejected outright via the pinned hash.
  CHECK_THROWS_WITH(run_evaluate(manifest_path, ts::occlusion_fixture_asset(), cfg),
                    doctest::Contains("hash mismatch"));

  // Remove one prediction: that row fails with a reason, the rest evaluate.
  fs::remove(preds + "/sample_000002.obj");
  const EvaluateOutput missing = run_evaluate(manifest_path, asset, cfg);
  CHECK(missing.batch.n_ok == 2);
  REQUIRE(missing.batch.failures.size() == 1);
  CHECK(missing.batch.failures[0].first == 2);
  CHECK(missing.batch.failures[0].second.find("no prediction found") != std::string::npos);
  CHECK(!missing.per_sample[2].e_all.has_value());
  CHECK(*missing.per_sample[0].e_all == 0.0);

  // Corrupt one ground-truth params file: only that row fails.
  std::ofstream(dir + "/" + m.rows[1].params) << "{ not json";
  const EvaluateOutput corrupt = run_evaluate(manifest_path, asset, cfg);
  CHECK(corrupt.batch.n_ok == 1);
  CHECK(corrupt.batch.failures.size() == 2);  // corrupt params + missing prediction
  CHECK(*corrupt.per_sample[0].e_all == 0.0);

  ts::remove_tree(dir);
}

TEST_CASE("consistency run skips rows without rgb and scores self-rendered rows") {
  const std::string dir = small_pipeline("pipe_consistency", 2, 128);
  const std::string manifest_path = dir + "/manifest.jsonl";

  ConsistencyConfig cfg;
  const std::string out = dir + "/consistency";
  const ConsistencyRunOutput none = run_consistency(manifest_path, cfg, out);
  CHECK(none.n_skipped == 2);
  CHECK(none.batch.n_ok == 0);
  CHECK(none.batch.all_ok());
  CHECK(!none.per_sample[0].has_value());
  REQUIRE(fs::exists(out + "/consistency.csv"));
  CHECK(read_file(out + "/consistency.csv").find("skipped") != std::string::npos);

  // Promote row 0's own silhouette to a white-on-black "photo".
  Manifest m = read_manifest(manifest_path);
  const Mask sil = read_mask_png(dir + "/" + m.rows[0].silhouette);
  Image<std::uint8_t> rgb(sil.width, sil.height, 3);
  for (int y = 0; y < sil.height; ++y)
    for (int x = 0; x < sil.width; ++x)
      for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = sil.at(x, y) ? 255 : 0;
  write_png(dir + "/renders/sample_000000_rgb.png", rgb);
  m.rows[0].rgb = "renders/sample_000000_rgb.png";
  write_manifest(m, manifest_path);

  const ConsistencyRunOutput scored = run_consistency(manifest_path, cfg, out);
  CHECK(scored.n_skipped == 1);
  CHECK(scored.batch.n_ok == 1);
  REQUIRE(scored.per_sample[0].has_value());
  const ConsistencyReport& rep = *scored.per_sample[0];
  REQUIRE(rep.matched.mean_dist_px.has_value());
  CHECK(*rep.matched.mean_dist_px < 1.0);
  REQUIRE(rep.shifted.mean_dist_px.has_value());
  CHECK(*rep.shifted.mean_dist_px > *rep.matched.mean_dist_px);
  CHECK(rep.n_boundary_px > 0);

  const nlohmann::json summary =
      nlohmann::json::parse(read_file(out + "/consistency_summary.json"));
  CHECK(summary.at("n_ok").get<int>() == 1);
  CHECK(summary.at("n_skipped").get<int>() == 1);
  CHECK(summary.at("control_separation").at("n_matched_better").get<int>() == 1);

  ts::remove_tree(dir);
}

TEST_CASE("fit run recovers the sampled parameters from stored landmarks") {
  const ModelAsset& asset = ts::toy_asset();
  const std::string dir = small_pipeline("pipe_fit", 2, 96, 64);
  const std::string manifest_path = dir + "/manifest.jsonl";

  const std::string out = dir + "/fits";
  const FitRunOutput fit = run_fit(manifest_path, asset, out);
  CHECK(fit.batch.all_ok());
  REQUIRE(fit.rms.size() == 2);
  for (double rms : fit.rms) CHECK(rms < 1e-6);

  REQUIRE(fs::exists(out + "/fit_report.csv"));
  const std::vector<double> rms_col = read_csv_column(out + "/fit_report.csv", "rms");
  REQUIRE(rms_col.size() == 2);
  for (double rms : rms_col) CHECK(rms < 1e-6);
  const std::vector<double> conv = read_csv_column(out + "/fit_report.csv", "converged");
  for (double c : conv) CHECK(c == 1.0);
  CHECK(fs::exists(out + "/sample_000000.json"));

  // The fitted parameter files decode to the ground-truth landmarks.
  const ParamsFile fitted = read_params_json(out + "/sample_000001.json");
  const Manifest m = read_manifest(manifest_path);
  const LandmarkSet3D target = read_landmarks3d_json(dir + "/" + m.rows[1].landmarks_3d);
  const LandmarkSet3D redecoded = decode(asset, fitted.beta, fitted.theta).landmarks;
  CHECK((redecoded.points - target.points).cwiseAbs().maxCoeff() < 1e-5);

  // Unrendered manifests are reported per row, not thrown.
  const std::string bare = ts::temp_dir("pipe_fit_bare");
  run_sample(toy_spec(), 1, bare, &asset);
  const FitRunOutput unrendered = run_fit(bare + "/manifest.jsonl", asset, bare + "/fits");
  CHECK(unrendered.batch.n_ok == 0);
  REQUIRE(unrendered.batch.failures.size() == 1);
  CHECK(unrendered.batch.failures[0].second.find("run render first") != std::string::npos);

  ts::remove_tree(dir);
  ts::remove_tree(bare);
}

TEST_CASE("paired statistics summarize metric differences deterministically") {
  const std::vector<double> a = {0.10, 0.22, 0.15, 0.30, 0.08, 0.19, 0.27, 0.12};
  const std::vector<double> b = {0.14, 0.25, 0.13, 0.36, 0.11, 0.24, 0.30, 0.18};

  const PairedStats s = paired_stats(a, b, 500, 0.95, 99);
  CHECK(s.n == 8);
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(a.size());
  CHECK(s.mean_diff == doctest::Approx(mean).epsilon(1e-12));
  CHECK(s.better_fraction == doctest::Approx(7.0 / 8.0));
  CHECK(s.wilcoxon_p > 0.0);
  CHECK(s.wilcoxon_p <= 1.0);
  CHECK(s.mean_ci.first <= s.mean_diff);
  CHECK(s.mean_ci.second >= s.mean_diff);

  const PairedStats again = paired_stats(a, b, 500, 0.95, 99);
  CHECK(again.mean_ci == s.mean_ci);
  CHECK(again.median_ci == s.median_ci);
  CHECK(again.wilcoxon_p == s.wilcoxon_p);

  const nlohmann::json j = paired_stats_json(s, 500, 0.95, 99);
  CHECK(j.at("n").get<int>() == 8);
  CHECK(j.at("wilcoxon_p").get<double>() == s.wilcoxon_p);

  CHECK_THROWS_AS(paired_stats({1.0, 2.0}, {1.0}, 100, 0.95, 0), std::invalid_argument);
  CHECK_THROWS_AS(paired_stats({1.0}, {1.0}, 100, 0.95, 0), std::invalid_argument);
  // Identical columns leave no nonzero differences for the signed-rank test.
  CHECK_THROWS(paired_stats(a, a, 100, 0.95, 0));
}

TEST_CASE("csv column reader handles report files and rejects undefined cells") {
  const std::string dir = ts::temp_dir("pipe_csv");
  const std::string path = dir + "/table.csv";

  std::ofstream(path) << "id,score,note\r\n0,1.5,ok\r\n1,2.25,ok\r\n2,-0.5,ok\n";
  const std::vector<double> scores = read_csv_column(path, "score");
  REQUIRE(scores.size() == 3);
  CHECK(scores[0] == 1.5);
  CHECK(scores[1] == 2.25);
  CHECK(scores[2] == -0.5);

  CHECK_THROWS_WITH(read_csv_column(path, "weight"), doctest::Contains("no column named"));

  std::ofstream(path) << "id,score\n0,1.0\n1,\n";
  CHECK_THROWS_WITH(read_csv_column(path, "score"), doctest::Contains("blank"));

  std::ofstream(path) << "id,score\n0,abc\n";
  CHECK_THROWS(read_csv_column(path, "score"));

  // Trailing commas produce an empty final cell, not a short row.
  std::ofstream(path) << "id,score,\n0,3.5,\n";
  const std::vector<double> tail = read_csv_column(path, "score");
  REQUIRE(tail.size() == 1);
  CHECK(tail[0] == 3.5);

  CHECK_THROWS(read_csv_column(dir + "/absent.csv", "score"));

  ts::remove_tree(dir);
}
