#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"
#include "profilebench/pipeline.hpp"

namespace pb = profilebench;
namespace fs = std::filesystem;

namespace {

int report_batch(const pb::BatchResult& batch, const std::string& verb) {
  std::cout << verb << ": " << batch.n_ok << " ok, " << batch.failures.size() << " failed\n";
  for (const auto& [id, reason] : batch.failures)
    std::cerr << "  sample " << id << ": " << reason << "\n";
  return batch.failures.empty() ? 0 : 2;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"profilebench: profile-view head model sampling, rendering and evaluation"};
  app.require_subcommand(1);

  int workers = 0;
  app.add_option("--workers", workers, "worker threads for parallel kernels (0 = default)");

  // make-asset
  auto* cmd_asset = app.add_subcommand("make-asset", "write a procedural test asset");
  std::string asset_out;
  std::uint64_t asset_seed = 7;
  int asset_vertices = 2500;
  int asset_shape_dim = 20;
  cmd_asset->add_option("--out", asset_out, "asset directory")->required();
  cmd_asset->add_option("--seed", asset_seed, "generator seed");
  cmd_asset->add_option("--vertices", asset_vertices, "approximate vertex count");
  cmd_asset->add_option("--shape-dim", asset_shape_dim, "shape basis size");

  // sample
  auto* cmd_sample = app.add_subcommand("sample", "draw parameters and write a manifest");
  std::string sample_asset, sample_out;
  int sample_count = 0;
  std::uint64_t sample_seed = 0;
  pb::SampleSpec spec;
  cmd_sample->add_option("--asset", sample_asset, "model asset directory")->required();
  cmd_sample->add_option("--out", sample_out, "output dataset directory")->required();
  cmd_sample->add_option("--count", sample_count, "number of samples")->required();
  cmd_sample->add_option("--seed", sample_seed, "base seed");
  cmd_sample->add_option("--sigma", spec.sigma, "parameter std dev");
  cmd_sample->add_option("--clip", spec.clip, "truncation bound");
  cmd_sample->add_option("--yaw-min", spec.yaw_min_deg, "yaw lower bound, degrees");
  cmd_sample->add_option("--yaw-max", spec.yaw_max_deg, "yaw upper bound, degrees");

  // decode
  auto* cmd_decode = app.add_subcommand("decode", "decode manifest params to OBJ meshes");
  std::string decode_manifest, decode_asset, decode_out;
  cmd_decode->add_option("--manifest", decode_manifest, "manifest path")->required();
  cmd_decode->add_option("--asset", decode_asset, "model asset directory")->required();
  cmd_decode->add_option("--out", decode_out, "output directory")->required();

  // render
  auto* cmd_render = app.add_subcommand("render", "render geometry buffers for every sample");
  std::string render_manifest, render_asset;
  int render_resolution = pb::defaults::kRenderResolution;
  int render_vis_resolution = pb::defaults::kVisibilityResolution;
  cmd_render->add_option("--manifest", render_manifest, "manifest path")->required();
  cmd_render->add_option("--asset", render_asset, "model asset directory")->required();
  cmd_render->add_option("--resolution", render_resolution, "render resolution");
  cmd_render->add_option("--visibility-resolution", render_vis_resolution,
                         "visibility raster resolution");

  // export-conditioning
  auto* cmd_export = app.add_subcommand("export-conditioning",
                                        "write diffusion conditioning bundles");
  std::string export_manifest, export_out;
  pb::PromptConfig prompt;
  cmd_export->add_option("--manifest", export_manifest, "manifest path")->required();
  cmd_export->add_option("--out", export_out, "bundle output directory")->required();
  cmd_export->add_option("--prompt", prompt.positive, "positive prompt");
  cmd_export->add_option("--negative-prompt", prompt.negative, "negative prompt");
  cmd_export->add_option("--steps", prompt.steps, "sampler steps");
  cmd_export->add_option("--guidance", prompt.guidance, "guidance scale");

  // evaluate
  auto* cmd_eval = app.add_subcommand("evaluate", "score predictions against the manifest");
  std::string eval_manifest, eval_asset, eval_predictions, eval_out;
  std::string protocol = "aligned";
  pb::EvaluateConfig eval_config;
  cmd_eval->add_option("--manifest", eval_manifest, "manifest path")->required();
  cmd_eval->add_option("--asset", eval_asset, "model asset directory")->required();
  cmd_eval->add_option("--predictions", eval_predictions, "directory of sample_*.obj or .json")
      ->required();
  cmd_eval->add_option("--out", eval_out, "report output directory")->required();
  cmd_eval->add_option("--protocol", protocol, "aligned or raw")
      ->check(CLI::IsMember({"aligned", "raw"}));
  cmd_eval->add_option("--resolution", eval_config.silhouette_resolution,
                       "silhouette raster resolution");
  cmd_eval->add_flag("--with-scale", eval_config.with_scale,
                     "allow a similarity (not just rigid) alignment");

  // consistency
  auto* cmd_cons = app.add_subcommand("consistency",
                                      "check rgb edges against silhouette boundaries");
  std::string cons_manifest, cons_out;
  pb::ConsistencyConfig cons_config;
  cmd_cons->add_option("--manifest", cons_manifest, "manifest path")->required();
  cmd_cons->add_option("--out", cons_out, "report output directory")->required();
  cmd_cons->add_option("--band-width", cons_config.band_width_px, "boundary band radius, px");
  cmd_cons->add_option("--edge-threshold", cons_config.sobel_threshold,
                       "normalized Sobel threshold");

  // fit
  auto* cmd_fit = app.add_subcommand("fit", "fit shape and pose to stored 3D landmarks");
  std::string fit_manifest, fit_asset, fit_out;
  pb::FitOptions fit_options;
  cmd_fit->add_option("--manifest", fit_manifest, "manifest path")->required();
  cmd_fit->add_option("--asset", fit_asset, "model asset directory")->required();
  cmd_fit->add_option("--out", fit_out, "fitted parameter output directory")->required();
  cmd_fit->add_option("--regularization", fit_options.regularization, "shape penalty weight");
  cmd_fit->add_option("--max-iterations", fit_options.max_iterations, "iteration cap");

  // stats
  auto* cmd_stats = app.add_subcommand("stats", "paired bootstrap and signed-rank comparison");
  std::string stats_a, stats_b, stats_column = "e_vis", stats_out;
  int n_boot = 2000;
  double level = 0.95;
  std::uint64_t stats_seed = 0;
  cmd_stats->add_option("--a", stats_a, "first evaluation csv")->required();
  cmd_stats->add_option("--b", stats_b, "second evaluation csv")->required();
  cmd_stats->add_option("--column", stats_column, "metric column name");
  cmd_stats->add_option("--out", stats_out, "output json path");
  cmd_stats->add_option("--n-boot", n_boot, "bootstrap resamples");
  cmd_stats->add_option("--level", level, "confidence level");
  cmd_stats->add_option("--seed", stats_seed, "bootstrap seed");

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#endif

  try {
    if (*cmd_asset) {
      const pb::ModelAsset asset =
          pb::make_toy_model(asset_seed, asset_vertices, asset_shape_dim);
      pb::save_model_asset(asset, asset_out);
      std::cout << "wrote asset '" << asset.name << "' (" << asset.vertex_count()
                << " vertices, hash " << asset.content_hash() << ") to " << asset_out << "\n";
      return 0;
    }
    if (*cmd_sample) {
      const pb::ModelAsset asset = pb::load_model_asset(sample_asset);
      spec.base_seed = sample_seed;
      spec.shape_dim = asset.shape_dim();
      spec.pose_dim = 2 + 3 * (asset.joint_count() - 1);
      const pb::Manifest manifest = pb::run_sample(spec, sample_count, sample_out, &asset);
      std::cout << "wrote " << manifest.rows.size() << " samples to " << sample_out
                << " (splits " << manifest.header["splits"].dump() << ")\n";
      return 0;
    }
    if (*cmd_decode) {
      const pb::ModelAsset asset = pb::load_model_asset(decode_asset);
      return report_batch(pb::run_decode(decode_manifest, asset, decode_out), "decode");
    }
    if (*cmd_render) {
      const pb::ModelAsset asset = pb::load_model_asset(render_asset);
      pb::RenderConfig config;
      config.camera = pb::Camera{}.with_resolution(render_resolution);
      config.visibility_resolution = render_vis_resolution;
      return report_batch(pb::run_render(render_manifest, asset, config), "render");
    }
    if (*cmd_export) {
      return report_batch(pb::run_export_conditioning(export_manifest, export_out, prompt),
                          "export-conditioning");
    }
    if (*cmd_eval) {
      const pb::ModelAsset asset = pb::load_model_asset(eval_asset);
      eval_config.protocol =
          protocol == "raw" ? pb::Protocol::kRaw : pb::Protocol::kAligned;
      eval_config.predictions_dir = eval_predictions;
      eval_config.out_dir = eval_out;
      const pb::EvaluateOutput out = pb::run_evaluate(eval_manifest, asset, eval_config);
      std::cout << out.summary.dump(2) << "\n";
      return out.batch.all_ok() ? 0 : 2;
    }
    if (*cmd_cons) {
      const pb::ConsistencyRunOutput out =
          pb::run_consistency(cons_manifest, cons_config, cons_out);
      std::cout << "consistency: " << out.batch.n_ok << " ok, " << out.n_skipped
                << " skipped, " << out.batch.failures.size() << " failed\n";
      for (const auto& [id, reason] : out.batch.failures)
        std::cerr << "  sample " << id << ": " << reason << "\n";
      return out.batch.all_ok() ? 0 : 2;
    }
    if (*cmd_fit) {
      const pb::ModelAsset asset = pb::load_model_asset(fit_asset);
      return report_batch(pb::run_fit(fit_manifest, asset, fit_out, fit_options).batch, "fit");
    }
    if (*cmd_stats) {
      const std::vector<double> a = pb::read_csv_column(stats_a, stats_column);
      const std::vector<double> b = pb::read_csv_column(stats_b, stats_column);
      const pb::PairedStats stats = pb::paired_stats(a, b, n_boot, level, stats_seed);
      nlohmann::json j = pb::paired_stats_json(stats, n_boot, level, stats_seed);
      j["column"] = stats_column;
      j["a"] = stats_a;
      j["b"] = stats_b;
      const std::string text = j.dump(2) + "\n";
      std::cout << text;
      if (!stats_out.empty()) write_file(stats_out, text);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
