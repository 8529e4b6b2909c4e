#include "profilebench/manifest.hpp"

#include <fstream>
#include <stdexcept>

namespace profilebench {

using nlohmann::json;

json ManifestRow::to_json() const {
  json j;
  j["id"] = id;
  j["seed"] = seed;
  j["split"] = split;
  j["params"] = params;
  auto set_if = [&](const char* key, const std::string& value) {
    if (!value.empty()) j[key] = value;
  };
  set_if("depth", depth);
  set_if("normal", normal);
  set_if("silhouette", silhouette);
  set_if("face_id", face_id);
  set_if("visibility", visibility);
  set_if("landmarks_2d", landmarks_2d);
  set_if("landmarks_3d", landmarks_3d);
  set_if("rgb", rgb);
  return j;
}

ManifestRow ManifestRow::from_json(const json& j) {
  ManifestRow row;
  row.id = j.at("id").get<int>();
  row.seed = j.at("seed").get<std::uint64_t>();
  row.split = j.at("split").get<std::string>();
  row.params = j.value("params", "");
  row.depth = j.value("depth", "");
  row.normal = j.value("normal", "");
  row.silhouette = j.value("silhouette", "");
  row.face_id = j.value("face_id", "");
  row.visibility = j.value("visibility", "");
  row.landmarks_2d = j.value("landmarks_2d", "");
  row.landmarks_3d = j.value("landmarks_3d", "");
  row.rgb = j.value("rgb", "");
  return row;
}

void Manifest::validate() const {
  if (!header.is_object() || header.value("format", "") != "profilebench-manifest") {
    throw std::runtime_error("manifest: missing or unrecognized header");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ManifestRow& row = rows[i];
    if (row.id != static_cast<int>(i)) {
      throw std::runtime_error("manifest: ids must be dense from 0, row " +
                               std::to_string(i) + " has id " + std::to_string(row.id));
    }
    for (const std::string* path :
         {&row.params, &row.depth, &row.normal, &row.silhouette, &row.face_id,
          &row.visibility, &row.landmarks_2d, &row.landmarks_3d, &row.rgb}) {
      if (!path->empty() && (*path)[0] == '/') {
        throw std::runtime_error("manifest: absolute path in row " + std::to_string(i) +
                                 ": " + *path);
      }
    }
  }
}

std::string Manifest::asset_hash() const { return header.value("asset_hash", ""); }

void write_manifest(const Manifest& manifest, const std::string& path) {
  manifest.validate();
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_manifest: cannot open " + path);
  f << manifest.header.dump() << "\n";
  for (const ManifestRow& row : manifest.rows) f << row.to_json().dump() << "\n";
  if (!f) throw std::runtime_error("write_manifest: short write to " + path);
}

Manifest read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_manifest: cannot open " + path);
  Manifest manifest;
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("read_manifest: empty file");
  try {
    manifest.header = json::parse(line);
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      manifest.rows.push_back(ManifestRow::from_json(json::parse(line)));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("read_manifest: parse error in " + path + ": " + e.what());
  }
  manifest.validate();
  return manifest;
}

}  // namespace profilebench
