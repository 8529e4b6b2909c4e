#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace profilebench {

struct ManifestRow {
  int id = 0;
  std::uint64_t seed = 0;
  std::string split;
  std::string params;      // all paths relative to the manifest directory
  std::string depth;
  std::string normal;
  std::string silhouette;
  std::string face_id;
  std::string visibility;
  std::string landmarks_2d;
  std::string landmarks_3d;
  std::string rgb;         // optional, synthesized externally

  nlohmann::json to_json() const;
  static ManifestRow from_json(const nlohmann::json& j);
};

// JSONL: one JSON header line, then one row object per line. Streams over
// large sample counts without loading everything through a parser at once.
struct Manifest {
  nlohmann::json header;
  std::vector<ManifestRow> rows;

  // ids dense from 0 in row order, all paths relative.
  void validate() const;
  std::string asset_hash() const;
};

void write_manifest(const Manifest& manifest, const std::string& path);
Manifest read_manifest(const std::string& path);

}  // namespace profilebench
