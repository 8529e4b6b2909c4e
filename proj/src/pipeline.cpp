#include "profilebench/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "profilebench/image_io.hpp"
#include "profilebench/mesh_io.hpp"
#include "profilebench/raster.hpp"

namespace fs = std::filesystem;

namespace profilebench {
namespace {

std::string sample_stem(int id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sample_%06d", id);
  return buf;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

nlohmann::json vec3_to_json(const Vec3& v) { return nlohmann::json{v.x(), v.y(), v.z()}; }

Eigen::VectorXd json_to_vec(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Vec3 json_to_vec3(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

nlohmann::json camera_to_json(const Camera& camera) {
  return {{"distance", camera.distance}, {"fov_deg", camera.fov_deg},
          {"width", camera.width},       {"height", camera.height},
          {"near", camera.near},         {"far", camera.far}};
}

Camera camera_from_json(const nlohmann::json& j) {
  Camera c;
  c.distance = j.at("distance").get<double>();
  c.fov_deg = j.at("fov_deg").get<double>();
  c.width = j.at("width").get<int>();
  c.height = j.at("height").get<int>();
  c.near = j.at("near").get<double>();
  c.far = j.at("far").get<double>();
  c.validate();
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string join(const std::string& base_dir, const std::string& rel) {
  return (fs::path(base_dir) / rel).string();
}

Mask silhouette_to_mask(const RasterBuffers& buffers) {
  Mask m(buffers.width, buffers.height, 1);
  m.data = buffers.silhouette;
  return m;
}

// Shared per-run state resolved from a manifest on disk.
struct LoadedManifest {
  Manifest manifest;
  std::string dir;
};

LoadedManifest load(const std::string& manifest_path) {
  LoadedManifest lm;
  lm.manifest = read_manifest(manifest_path);
  lm.dir = fs::path(manifest_path).parent_path().string();
  if (lm.dir.empty()) lm.dir = ".";
  return lm;
}

void require_matching_asset(const Manifest& manifest, const ModelAsset& asset) {
  const std::string recorded = manifest.asset_hash();
  if (recorded.empty())
    throw std::runtime_error("manifest does not record an asset hash");
  const std::string actual = asset.content_hash();
  if (recorded != actual)
    throw std::runtime_error("asset hash mismatch: manifest has " + recorded +
                             ", asset is " + actual);
}

PoseParams params_to_pose(const ParamsFile& p) { return p.theta; }

// Prediction loading for evaluate: either the decoded OBJ or a params file
// that is decoded against the shared asset.
Mesh load_prediction(const std::string& predictions_dir, int id, const ModelAsset& asset) {
  const std::string stem = (fs::path(predictions_dir) / sample_stem(id)).string();
  const std::string obj_path = stem + ".obj";
  const std::string json_path = stem + ".json";
  if (fs::exists(obj_path)) {
    Mesh mesh = read_obj(obj_path);
    if (mesh.vertex_count() != asset.vertex_count())
      throw std::runtime_error("prediction vertex count " +
                               std::to_string(mesh.vertex_count()) + " does not match model " +
                               std::to_string(asset.vertex_count()));
    if (mesh.face_count() == 0) mesh.faces = asset.faces;
    return mesh;
  }
  if (fs::exists(json_path)) {
    const ParamsFile p = read_params_json(json_path);
    if (p.beta.dim() != asset.shape_dim())
      throw std::runtime_error("prediction shape dim mismatch");
    return decode(asset, p.beta, params_to_pose(p)).mesh;
  }
  throw std::runtime_error("no prediction found at " + obj_path + " or " + json_path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string opt_cell(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

struct Aggregate {
  std::vector<double> values;

  void add(const std::optional<double>& v) {
    if (v) values.push_back(*v);
  }
  nlohmann::json summary() {
    nlohmann::json j;
    j["count"] = values.size();
    if (values.empty()) return j;
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    j["mean"] = mean;
    j["median"] = evaluate_statistic(values, Statistic::kMedian);
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    j["std"] = values.size() > 1 ? std::sqrt(sq / static_cast<double>(values.size() - 1)) : 0.0;
    return j;
  }
};

}  // namespace

void write_params_json(const std::string& path, const ParamsFile& params) {
  nlohmann::json j;
  j["id"] = params.id;
  j["seed"] = params.seed;
  j["split"] = params.split;
  j["yaw_deg"] = params.yaw_deg;
  j["beta"] = vec_to_json(params.beta.beta);
  nlohmann::json articulated = nlohmann::json::array();
  for (const Vec3& aa : params.theta.articulated_rotations)
    articulated.push_back(vec3_to_json(aa));
  j["theta"] = {{"global_rotation", vec3_to_json(params.theta.global_rotation)},
                {"articulated", articulated}};
  j["pose_scalars"] = params.pose_scalars;
  write_text(path, j.dump(2) + "\n");
}

ParamsFile read_params_json(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  ParamsFile p;
  try {
    p.id = j.at("id").get<int>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.split = j.value("split", std::string());
    p.yaw_deg = j.value("yaw_deg", 0.0);
    p.beta = ShapeParams(json_to_vec(j.at("beta")));
    const nlohmann::json& theta = j.at("theta");
    p.theta.global_rotation = json_to_vec3(theta.at("global_rotation"));
    for (const nlohmann::json& aa : theta.at("articulated"))
      p.theta.articulated_rotations.push_back(json_to_vec3(aa));
    if (j.contains("pose_scalars"))
      p.pose_scalars = j.at("pose_scalars").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  p.theta.check_finite();
  return p;
}

void write_landmarks3d_json(const std::string& path, const LandmarkSet3D& landmarks) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < landmarks.count(); ++i) {
    arr.push_back({{"label", landmarks.labels[i]},
                   {"contour", landmarks.contour_flags[i] != 0},
                   {"position", nlohmann::json{landmarks.points(i, 0), landmarks.points(i, 1),
                                               landmarks.points(i, 2)}}});
  }
  write_text(path, nlohmann::json{{"landmarks", arr}}.dump(2) + "\n");
}

LandmarkSet3D read_landmarks3d_json(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  LandmarkSet3D set;
  try {
    const nlohmann::json& arr = j.at("landmarks");
    set.points.resize(static_cast<Eigen::Index>(arr.size()), 3);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const nlohmann::json& lm = arr[i];
      set.labels.push_back(lm.at("label").get<std::string>());
      set.contour_flags.push_back(lm.at("contour").get<bool>() ? 1 : 0);
      const Vec3 p = json_to_vec3(lm.at("position"));
      set.points.row(static_cast<Eigen::Index>(i)) = p.transpose();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return set;
}

void write_landmarks2d_json(const std::string& path, const Projection& projection,
                            const std::vector<std::string>& labels) {
  if (static_cast<std::size_t>(projection.pixels.rows()) != labels.size())
    throw std::invalid_argument("landmark label count does not match projection");
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < projection.pixels.rows(); ++i) {
    nlohmann::json entry;
    entry["label"] = labels[static_cast<std::size_t>(i)];
    entry["valid"] = projection.valid[static_cast<std::size_t>(i)] != 0;
    if (projection.valid[static_cast<std::size_t>(i)]) {
      entry["pixel"] = {projection.pixels(i, 0), projection.pixels(i, 1)};
      entry["depth"] = projection.depth[i];
    } else {
      entry["pixel"] = nullptr;
      entry["depth"] = nullptr;
    }
    arr.push_back(entry);
  }
  write_text(path, nlohmann::json{{"landmarks", arr}}.dump(2) + "\n");
}

Manifest run_sample(const SampleSpec& spec, int count, const std::string& out_dir,
                    const ModelAsset* asset) {
  spec.validate();
  if (count <= 0) throw std::invalid_argument("sample count must be positive");
  if (asset != nullptr && asset->shape_dim() != spec.shape_dim)
    throw std::invalid_argument("spec shape_dim " + std::to_string(spec.shape_dim) +
                                " does not match asset shape_dim " +
                                std::to_string(asset->shape_dim()));

  fs::create_directories(fs::path(out_dir) / "params");
  const SplitSizes sizes = default_split_sizes(count);

  Manifest manifest;
  manifest.header = {{"format", "profilebench-manifest"},
                     {"format_version", 1},
                     {"count", count},
                     {"splits", {{"train", sizes.train}, {"val", sizes.val}, {"test", sizes.test}}},
                     {"sample_spec",
                      {{"sigma", spec.sigma},
                       {"clip", spec.clip},
                       {"yaw_min_deg", spec.yaw_min_deg},
                       {"yaw_max_deg", spec.yaw_max_deg},
                       {"shape_dim", spec.shape_dim},
                       {"pose_dim", spec.pose_dim},
                       {"base_seed", spec.base_seed}}},
                     {"yaw_composition",
                      "global = log(R(rx,0,rz) * R_y(yaw)); neck triples kept below pi"},
                     {"camera", camera_to_json(Camera{})}};
  if (asset != nullptr) {
    manifest.header["asset_hash"] = asset->content_hash();
    manifest.header["asset_name"] = asset->name;
  }

  for (int id = 0; id < count; ++id) {
    SampleRecord rec = sample_record(spec, id);
    rec.split = assign_split(id, sizes);

    ParamsFile p;
    p.id = rec.id;
    p.seed = rec.seed;
    p.split = rec.split;
    p.yaw_deg = rec.yaw_deg;
    p.beta = rec.beta;
    p.theta = rec.theta;
    p.pose_scalars = rec.pose_scalars;
    const std::string rel = "params/" + sample_stem(id) + ".json";
    write_params_json(join(out_dir, rel), p);

    ManifestRow row;
    row.id = rec.id;
    row.seed = rec.seed;
    row.split = rec.split;
    row.params = rel;
    manifest.rows.push_back(std::move(row));
  }

  write_manifest(manifest, (fs::path(out_dir) / "manifest.jsonl").string());
  return manifest;
}

BatchResult run_render(const std::string& manifest_path, const ModelAsset& asset,
                       const RenderConfig& config) {
  config.camera.validate();
  if (config.visibility_resolution < 8)
    throw std::invalid_argument("visibility resolution too small");
  LoadedManifest lm = load(manifest_path);
  if (!lm.manifest.asset_hash().empty()) require_matching_asset(lm.manifest, asset);

  fs::create_directories(fs::path(lm.dir) / "renders");
  fs::create_directories(fs::path(lm.dir) / "landmarks");

  lm.manifest.header["asset_hash"] = asset.content_hash();
  lm.manifest.header["asset_name"] = asset.name;
  lm.manifest.header["camera"] = camera_to_json(config.camera);
  lm.manifest.header["visibility_resolution"] = config.visibility_resolution;

  BatchResult result;
  for (ManifestRow& row : lm.manifest.rows) {
    try {
      if (row.params.empty()) throw std::runtime_error("row has no params path");
      const ParamsFile p = read_params_json(join(lm.dir, row.params));
      const DecodeResult decoded = decode(asset, p.beta, p.theta);
      const RasterBuffers buffers = rasterize(config.camera, decoded.mesh);

      const std::string stem = sample_stem(row.id);
      const std::string depth_rel = "renders/" + stem + "_depth.pfm";
      const std::string normal_rel = "renders/" + stem + "_normal.png";
      const std::string sil_rel = "renders/" + stem + "_silhouette.png";
      const std::string faceid_rel = "renders/" + stem + "_faceid.bin";
      const std::string vis_rel = "renders/" + stem + "_visibility.bin";
      const std::string lm3d_rel = "landmarks/" + stem + "_lm3d.json";
      const std::string lm2d_rel = "landmarks/" + stem + "_lm2d.json";

      Image<float> depth(buffers.width, buffers.height, 1);
      for (std::size_t i = 0; i < buffers.depth.size(); ++i)
        depth.data[i] = static_cast<float>(buffers.depth[i]);
      write_pfm(join(lm.dir, depth_rel), depth);

      const std::vector<double> normals = render_normals(config.camera, decoded.mesh, buffers);
      write_normal_png(join(lm.dir, normal_rel), normals, buffers.width, buffers.height);
      write_mask_png(join(lm.dir, sil_rel), silhouette_to_mask(buffers));
      write_face_id_raster(join(lm.dir, faceid_rel), buffers.face_id, buffers.width,
                           buffers.height);

      const VisibilityMask vis =
          vertex_visibility(config.camera, decoded.mesh, config.visibility_resolution);
      write_visibility(join(lm.dir, vis_rel), vis.visible, vis.resolution);

      write_landmarks3d_json(join(lm.dir, lm3d_rel), decoded.landmarks);
      const Projection proj = project(config.camera, decoded.landmarks.points);
      write_landmarks2d_json(join(lm.dir, lm2d_rel), proj, decoded.landmarks.labels);

      row.depth = depth_rel;
      row.normal = normal_rel;
      row.silhouette = sil_rel;
      row.face_id = faceid_rel;
      row.visibility = vis_rel;
      row.landmarks_3d = lm3d_rel;
      row.landmarks_2d = lm2d_rel;
      ++result.n_ok;
    } catch (const std::exception& e) {
      result.failures.emplace_back(row.id, e.what());
    }
  }

  write_manifest(lm.manifest, manifest_path);
  return result;
}

BatchResult run_decode(const std::string& manifest_path, const ModelAsset& asset,
                       const std::string& out_dir) {
  LoadedManifest lm = load(manifest_path);
  if (!lm.manifest.asset_hash().empty()) require_matching_asset(lm.manifest, asset);
  fs::create_directories(out_dir);

  BatchResult result;
  for (const ManifestRow& row : lm.manifest.rows) {
    try {
      if (row.params.empty()) throw std::runtime_error("row has no params path");
      const ParamsFile p = read_params_json(join(lm.dir, row.params));
      const DecodeResult decoded = decode(asset, p.beta, p.theta);
      const std::string stem = (fs::path(out_dir) / sample_stem(row.id)).string();
      write_obj(stem + ".obj", decoded.mesh);
      write_landmarks3d_json(stem + "_lm3d.json", decoded.landmarks);
      ++result.n_ok;
    } catch (const std::exception& e) {
      result.failures.emplace_back(row.id, e.what());
    }
  }
  return result;
}

BatchResult run_export_conditioning(const std::string& manifest_path,
                                    const std::string& out_dir,
                                    const PromptConfig& prompt) {
  LoadedManifest lm = load(manifest_path);
  Camera camera;
  if (lm.manifest.header.contains("camera"))
    camera = camera_from_json(lm.manifest.header.at("camera"));

  BatchResult result;
  for (const ManifestRow& row : lm.manifest.rows) {
    try {
      if (row.depth.empty() || row.normal.empty())
        throw std::runtime_error("row has no rendered depth/normal; run render first");
      const fs::path bundle = fs::path(out_dir) / sample_stem(row.id);
      fs::create_directories(bundle);

      // Depth conditioning image: nearer is brighter, background black.
      const Image<float> depth = read_pfm(join(lm.dir, row.depth));
      Image<std::uint8_t> depth_png(depth.width, depth.height, 1);
      const double range = camera.far - camera.near;
      for (std::size_t i = 0; i < depth.data.size(); ++i) {
        const double d = depth.data[i];
        double v = 0.0;
        if (std::isfinite(d))
          v = (camera.far - std::clamp(d, camera.near, camera.far)) / range;
        depth_png.data[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
      write_png((bundle / "depth.png").string(), depth_png);

      fs::copy_file(join(lm.dir, row.normal), bundle / "normal.png",
                    fs::copy_options::overwrite_existing);

      nlohmann::json pj;
      pj["prompt"] = prompt.positive;
      pj["negative_prompt"] = prompt.negative;
      pj["steps"] = prompt.steps;
      pj["guidance_scale"] = prompt.guidance;
      pj["seed"] = row.seed;
      pj["conditioning"] = {{"depth", {{"image", "depth.png"}, {"scale", prompt.scale_depth}}},
                            {"normal", {{"image", "normal.png"}, {"scale", prompt.scale_normal}}}};
      pj["depth_encoding"] = {{"near", camera.near},
                              {"far", camera.far},
                              {"mapping", "(far - depth) / (far - near), background 0"}};
      write_text((bundle / "prompt.json").string(), pj.dump(2) + "\n");
      ++result.n_ok;
    } catch (const std::exception& e) {
      result.failures.emplace_back(row.id, e.what());
    }
  }
  return result;
}

EvaluateOutput run_evaluate(const std::string& manifest_path, const ModelAsset& asset,
                            const EvaluateConfig& config) {
  if (config.predictions_dir.empty())
    throw std::invalid_argument("predictions directory is required");
  if (config.silhouette_resolution < 8)
    throw std::invalid_argument("silhouette resolution too small");
  LoadedManifest lm = load(manifest_path);
  require_matching_asset(lm.manifest, asset);

  Camera camera;
  if (lm.manifest.header.contains("camera"))
    camera = camera_from_json(lm.manifest.header.at("camera"));
  const Camera sil_camera = camera.with_resolution(config.silhouette_resolution);

  if (!config.out_dir.empty()) fs::create_directories(config.out_dir);

  EvaluateOutput out;
  out.per_sample.resize(lm.manifest.rows.size());

  std::ostringstream csv;
  csv << "id,split,e_all,e_vis,e_jaw,e_jaw_vis,n_vis,n_jaw_vis,iou,boundary_chamfer,status,"
         "reason\n";

  Aggregate agg_all, agg_vis, agg_jaw, agg_jaw_vis, agg_iou, agg_chamfer;
  for (std::size_t r = 0; r < lm.manifest.rows.size(); ++r) {
    const ManifestRow& row = lm.manifest.rows[r];
    std::string status = "ok";
    std::string reason;
    MetricsReport report;
    try {
      if (row.params.empty()) throw std::runtime_error("row has no params path");
      const ParamsFile p = read_params_json(join(lm.dir, row.params));
      const DecodeResult gt = decode(asset, p.beta, p.theta);
      const Mesh pred = load_prediction(config.predictions_dir, row.id, asset);

      const VisibilityMask visibility =
          vertex_visibility(camera, gt.mesh, config.visibility_resolution);

      RigidTransform transform;
      if (config.protocol == Protocol::kAligned) {
        std::vector<int> subset;
        for (std::size_t i = 0; i < visibility.visible.size(); ++i)
          if (visibility.visible[i]) subset.push_back(static_cast<int>(i));
        transform = umeyama_align(pred.vertices, gt.mesh.vertices, subset, config.with_scale);
      }

      report = vertex_errors(pred, gt.mesh, transform, visibility, asset.jawline_indices);

      Mesh aligned = pred;
      aligned.vertices = transform.apply(pred.vertices);
      const Mask pred_sil = silhouette_to_mask(rasterize(sil_camera, aligned));
      const Mask gt_sil = silhouette_to_mask(rasterize(sil_camera, gt.mesh));
      report.iou = silhouette_iou(pred_sil, gt_sil);
      try {
        report.boundary_chamfer = boundary_chamfer(pred_sil, gt_sil);
      } catch (const std::exception& e) {
        reason = e.what();  // metric undefined, row still counts
      }
      out.per_sample[r] = report;
      ++out.batch.n_ok;
    } catch (const std::exception& e) {
      status = "failed";
      reason = e.what();
      report = MetricsReport{};
      out.batch.failures.emplace_back(row.id, reason);
    }

    if (status == "ok") {
      agg_all.add(report.e_all);
      agg_vis.add(report.e_vis);
      agg_jaw.add(report.e_jaw);
      agg_jaw_vis.add(report.e_jaw_vis);
      agg_iou.add(report.iou);
      agg_chamfer.add(report.boundary_chamfer);
    }

    csv << row.id << ',' << row.split << ',' << opt_cell(report.e_all) << ','
        << opt_cell(report.e_vis) << ',' << opt_cell(report.e_jaw) << ','
        << opt_cell(report.e_jaw_vis) << ',' << report.n_vis << ',' << report.n_jaw_vis << ','
        << opt_cell(report.iou) << ',' << opt_cell(report.boundary_chamfer) << ',' << status
        << ',' << reason << '\n';
  }

  nlohmann::json failures = nlohmann::json::array();
  for (const auto& [id, why] : out.batch.failures)
    failures.push_back({{"id", id}, {"reason", why}});

  out.summary = {
      {"protocol", config.protocol == Protocol::kAligned ? "aligned" : "raw"},
      {"with_scale", config.with_scale},
      {"n_samples", lm.manifest.rows.size()},
      {"n_ok", out.batch.n_ok},
      {"n_failed", out.batch.failures.size()},
      {"failures", failures},
      {"asset_hash", asset.content_hash()},
      {"camera", camera_to_json(camera)},
      {"silhouette_resolution", config.silhouette_resolution},
      {"visibility_resolution", config.visibility_resolution},
      {"metrics",
       {{"e_all", agg_all.summary()},
        {"e_vis", agg_vis.summary()},
        {"e_jaw", agg_jaw.summary()},
        {"e_jaw_vis", agg_jaw_vis.summary()},
        {"iou", agg_iou.summary()},
        {"boundary_chamfer", agg_chamfer.summary()}}}};

  if (!config.out_dir.empty()) {
    write_text((fs::path(config.out_dir) / "evaluation.csv").string(), csv.str());
    write_text((fs::path(config.out_dir) / "summary.json").string(),
               out.summary.dump(2) + "\n");
  }
  return out;
}

ConsistencyRunOutput run_consistency(const std::string& manifest_path,
                                     const ConsistencyConfig& config,
                                     const std::string& out_dir) {
  config.validate();
  LoadedManifest lm = load(manifest_path);
  if (!out_dir.empty()) fs::create_directories(out_dir);

  ConsistencyRunOutput out;
  out.per_sample.resize(lm.manifest.rows.size());

  std::ostringstream csv;
  csv << "id,matched_mean_px,matched_chamfer_px,matched_coverage,matched_edges,"
         "shifted_mean_px,shifted_chamfer_px,shifted_coverage,shifted_edges,"
         "n_boundary_px,status,reason\n";

  Aggregate agg_matched, agg_shifted, agg_cov;
  int n_separated = 0, n_comparable = 0;
  for (std::size_t r = 0; r < lm.manifest.rows.size(); ++r) {
    const ManifestRow& row = lm.manifest.rows[r];
    if (row.rgb.empty()) {
      ++out.n_skipped;
      csv << row.id << ",,,,,,,,,," << "skipped,no rgb image\n";
      continue;
    }
    try {
      if (row.silhouette.empty()) throw std::runtime_error("row has no silhouette render");
      const Image<std::uint8_t> rgb = read_png(join(lm.dir, row.rgb));
      const Mask sil = read_mask_png(join(lm.dir, row.silhouette));
      const ConsistencyReport rep = consistency_check(rgb, sil, config);
      out.per_sample[r] = rep;
      ++out.batch.n_ok;

      agg_matched.add(rep.matched.mean_dist_px);
      agg_shifted.add(rep.shifted.mean_dist_px);
      agg_cov.add(rep.matched.coverage_at_radius);
      if (rep.matched.mean_dist_px && rep.shifted.mean_dist_px) {
        ++n_comparable;
        if (*rep.matched.mean_dist_px < *rep.shifted.mean_dist_px) ++n_separated;
      }

      csv << row.id << ',' << opt_cell(rep.matched.mean_dist_px) << ','
          << opt_cell(rep.matched.sym_chamfer_px) << ','
          << opt_cell(rep.matched.coverage_at_radius) << ',' << rep.matched.n_edge_px << ','
          << opt_cell(rep.shifted.mean_dist_px) << ',' << opt_cell(rep.shifted.sym_chamfer_px)
          << ',' << opt_cell(rep.shifted.coverage_at_radius) << ',' << rep.shifted.n_edge_px
          << ',' << rep.n_boundary_px << ",ok,"
          << (rep.matched.reason.empty() ? rep.shifted.reason : rep.matched.reason) << '\n';
    } catch (const std::exception& e) {
      out.batch.failures.emplace_back(row.id, e.what());
      csv << row.id << ",,,,,,,,,,failed," << e.what() << '\n';
    }
  }

  if (!out_dir.empty()) {
    write_text((fs::path(out_dir) / "consistency.csv").string(), csv.str());
    nlohmann::json summary = {
        {"n_rows", lm.manifest.rows.size()},
        {"n_ok", out.batch.n_ok},
        {"n_skipped", out.n_skipped},
        {"n_failed", out.batch.failures.size()},
        {"matched_mean_px", agg_matched.summary()},
        {"shifted_mean_px", agg_shifted.summary()},
        {"matched_coverage", agg_cov.summary()},
        {"control_separation",
         {{"n_comparable", n_comparable}, {"n_matched_better", n_separated}}},
        {"config",
         {{"band_width_px", config.band_width_px},
          {"sobel_threshold", config.sobel_threshold},
          {"coverage_radius_px", config.coverage_radius_px},
          {"control_shift", {config.control_shift_x, config.control_shift_y}}}}};
    write_text((fs::path(out_dir) / "consistency_summary.json").string(),
               summary.dump(2) + "\n");
  }
  return out;
}

FitRunOutput run_fit(const std::string& manifest_path, const ModelAsset& asset,
                     const std::string& out_dir, const FitOptions& options) {
  LoadedManifest lm = load(manifest_path);
  require_matching_asset(lm.manifest, asset);
  fs::create_directories(out_dir);

  FitRunOutput out;
  out.rms.assign(lm.manifest.rows.size(), std::numeric_limits<double>::quiet_NaN());

  std::ostringstream csv;
  csv << "id,rms,iterations,converged,status,reason\n";
  for (std::size_t r = 0; r < lm.manifest.rows.size(); ++r) {
    const ManifestRow& row = lm.manifest.rows[r];
    try {
      if (row.landmarks_3d.empty())
        throw std::runtime_error("row has no 3D landmarks; run render first");
      const LandmarkSet3D target = read_landmarks3d_json(join(lm.dir, row.landmarks_3d));
      const FitResult fit =
          fit_landmarks(asset, target, ShapeParams::zeros(asset.shape_dim()),
                        PoseParams::zeros(asset.joint_count()), options);

      const LandmarkSet3D fitted = decode(asset, fit.beta, fit.theta).landmarks;
      const double rms = std::sqrt((fitted.points - target.points).squaredNorm() /
                                   static_cast<double>(target.count()));
      out.rms[r] = rms;

      ParamsFile p;
      p.id = row.id;
      p.seed = row.seed;
      p.split = row.split;
      p.beta = fit.beta;
      p.theta = fit.theta;
      write_params_json((fs::path(out_dir) / (sample_stem(row.id) + ".json")).string(), p);

      csv << row.id << ',' << fmt(rms) << ',' << fit.iterations << ','
          << (fit.converged ? 1 : 0) << ",ok,\n";
      ++out.batch.n_ok;
    } catch (const std::exception& e) {
      out.batch.failures.emplace_back(row.id, e.what());
      csv << row.id << ",,,,failed," << e.what() << '\n';
    }
  }
  write_text((fs::path(out_dir) / "fit_report.csv").string(), csv.str());
  return out;
}

PairedStats paired_stats(const std::vector<double>& a, const std::vector<double>& b,
                         int n_boot, double level, std::uint64_t seed) {
  if (a.size() != b.size())
    throw std::invalid_argument("paired statistics need equal-length series, got " +
                                std::to_string(a.size()) + " and " + std::to_string(b.size()));
  if (a.size() < 2) throw std::invalid_argument("paired statistics need at least 2 pairs");

  std::vector<double> diff(a.size());
  int better = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff[i] = a[i] - b[i];
    if (a[i] < b[i]) ++better;
  }

  PairedStats s;
  s.n = static_cast<int>(a.size());
  s.mean_diff = evaluate_statistic(diff, Statistic::kMean);
  s.median_diff = evaluate_statistic(diff, Statistic::kMedian);
  s.mean_ci = bootstrap_ci(diff, Statistic::kMean, n_boot, level, seed);
  s.median_ci = bootstrap_ci(diff, Statistic::kMedian, n_boot, level, seed);
  s.wilcoxon_p = wilcoxon_signed_rank(a, b);
  s.better_fraction = static_cast<double>(better) / static_cast<double>(a.size());
  return s;
}

std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end())
    throw std::invalid_argument(path + ": no column named '" + column + "'");
  const std::size_t idx = static_cast<std::size_t>(it - header.begin());

  std::vector<double> values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (idx >= cells.size() || cells[idx].empty())
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": column '" + column +
                                  "' is blank (undefined metric); filter rows first");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cells[idx], &used);
    } catch (const std::exception&) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": '" + cells[idx] +
                                  "' is not a number");
    }
    if (used != cells[idx].size())
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": '" + cells[idx] +
                                  "' is not a number");
    values.push_back(v);
  }
  return values;
}

nlohmann::json paired_stats_json(const PairedStats& stats, int n_boot, double level,
                                 std::uint64_t seed) {
  return {{"n", stats.n},
          {"mean_diff", stats.mean_diff},
          {"mean_ci", {stats.mean_ci.first, stats.mean_ci.second}},
          {"median_diff", stats.median_diff},
          {"median_ci", {stats.median_ci.first, stats.median_ci.second}},
          {"wilcoxon_p", stats.wilcoxon_p},
          {"better_fraction", stats.better_fraction},
          {"n_boot", n_boot},
          {"level", level},
          {"seed", seed}};
}

}  // namespace profilebench
