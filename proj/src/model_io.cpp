#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "profilebench/model.hpp"

// Asset container: <dir>/model.json holds metadata, joint parents, the
// landmark table and jawline indices; each large array lives in its own raw
// .bin blob, little-endian, row-major (float32 for reals, uint32 for faces).

static_assert(std::endian::native == std::endian::little,
              "asset container IO assumes a little-endian host");

namespace profilebench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<float> to_f32(const Eigen::MatrixXd& m) {
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (long r = 0; r < m.rows(); ++r) {
    for (long c = 0; c < m.cols(); ++c) out.push_back(static_cast<float>(m(r, c)));
  }
  return out;
}

std::vector<float> to_f32(const MatX3& m) {
  return to_f32(Eigen::MatrixXd(m));
}

std::vector<std::uint32_t> to_u32(const FacesX3& m) {
  std::vector<std::uint32_t> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (long r = 0; r < m.rows(); ++r) {
    for (long c = 0; c < 3; ++c) out.push_back(static_cast<std::uint32_t>(m(r, c)));
  }
  return out;
}

template <typename T>
void write_blob(const fs::path& path, const std::vector<T>& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(T)));
  if (!f) throw std::runtime_error("short write to " + path.string());
}

template <typename T>
std::vector<T> read_blob(const fs::path& path, std::size_t expected_count) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  const auto size = static_cast<std::size_t>(f.tellg());
  if (size != expected_count * sizeof(T)) {
    throw std::runtime_error("blob " + path.string() + " has " + std::to_string(size) +
                             " bytes, expected " + std::to_string(expected_count * sizeof(T)));
  }
  std::vector<T> data(expected_count);
  f.seekg(0);
  f.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(size));
  if (!f) throw std::runtime_error("short read from " + path.string());
  return data;
}

class Fnv1a64 {
 public:
  void feed(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001B3ull;
    }
  }
  template <typename T>
  void feed_vec(const std::vector<T>& v) {
    feed(v.data(), v.size() * sizeof(T));
  }
  void feed_str(const std::string& s) { feed(s.data(), s.size()); }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash_));
    return std::string(buf);
  }

 private:
  std::uint64_t hash_ = 0xCBF29CE484222325ull;
};

json landmark_table(const ModelAsset& asset) {
  json table = json::array();
  for (const LandmarkAnchor& lm : asset.landmarks) {
    table.push_back({{"face", lm.face},
                     {"bary", {lm.bary[0], lm.bary[1], lm.bary[2]}},
                     {"label", lm.label},
                     {"contour", lm.contour}});
  }
  return table;
}

}  // namespace

std::string ModelAsset::content_hash() const {
  // Hashes the serialized (float32) representation so that an asset and its
  // on-disk round-trip produce the same value.
  Fnv1a64 h;
  h.feed_str(name);
  h.feed_str(version);
  h.feed_vec(to_f32(template_vertices));
  h.feed_vec(to_u32(faces));
  for (const MatX3& b : shape_basis) h.feed_vec(to_f32(b));
  h.feed_vec(to_f32(joint_regressor));
  for (int p : joint_parents) h.feed(&p, sizeof(p));
  h.feed_vec(to_f32(skin_weights));
  for (const LandmarkAnchor& lm : landmarks) {
    h.feed(&lm.face, sizeof(lm.face));
    const float b[3] = {static_cast<float>(lm.bary[0]), static_cast<float>(lm.bary[1]),
                        static_cast<float>(lm.bary[2])};
    h.feed(b, sizeof(b));
    h.feed_str(lm.label);
    const unsigned char c = lm.contour ? 1 : 0;
    h.feed(&c, 1);
  }
  for (int idx : jawline_indices) h.feed(&idx, sizeof(idx));
  return h.hex();
}

void save_model_asset(const ModelAsset& asset, const std::string& dir) {
  asset.validate();
  const fs::path root(dir);
  fs::create_directories(root);

  const int n = asset.vertex_count();
  const int f_count = asset.face_count();
  const int s = asset.shape_dim();
  const int j = asset.joint_count();

  write_blob(root / "template_vertices.bin", to_f32(asset.template_vertices));
  write_blob(root / "faces.bin", to_u32(asset.faces));
  {
    std::vector<float> basis;
    basis.reserve(static_cast<std::size_t>(s) * n * 3);
    for (const MatX3& b : asset.shape_basis) {
      std::vector<float> one = to_f32(b);
      basis.insert(basis.end(), one.begin(), one.end());
    }
    write_blob(root / "shape_basis.bin", basis);
  }
  write_blob(root / "joint_regressor.bin", to_f32(asset.joint_regressor));
  write_blob(root / "skin_weights.bin", to_f32(asset.skin_weights));

  json meta;
  meta["format"] = "profilebench-asset";
  meta["format_version"] = 1;
  meta["name"] = asset.name;
  meta["model_version"] = asset.version;
  meta["counts"] = {{"vertices", n}, {"faces", f_count}, {"shape_dim", s},
                    {"joints", j},   {"landmarks", asset.landmark_count()}};
  meta["byte_order"] = "little";
  meta["layout"] = "row-major";
  meta["arrays"] = {
      {"template_vertices", {{"file", "template_vertices.bin"}, {"dtype", "float32"}, {"shape", {n, 3}}}},
      {"faces", {{"file", "faces.bin"}, {"dtype", "uint32"}, {"shape", {f_count, 3}}}},
      {"shape_basis", {{"file", "shape_basis.bin"}, {"dtype", "float32"}, {"shape", {s, n, 3}}}},
      {"joint_regressor", {{"file", "joint_regressor.bin"}, {"dtype", "float32"}, {"shape", {j, n}}}},
      {"skin_weights", {{"file", "skin_weights.bin"}, {"dtype", "float32"}, {"shape", {n, j}}}},
  };
  meta["joint_parents"] = asset.joint_parents;
  meta["landmarks"] = landmark_table(asset);
  meta["jawline_indices"] = asset.jawline_indices;

  std::ofstream f(root / "model.json");
  if (!f) throw std::runtime_error("cannot write " + (root / "model.json").string());
  f << meta.dump(2) << "\n";
}

ModelAsset load_model_asset(const std::string& dir) {
  const fs::path root(dir);
  const fs::path meta_path = root / "model.json";
  if (!fs::exists(meta_path)) {
    throw std::runtime_error("model asset not found: " + meta_path.string());
  }
  std::ifstream f(meta_path);
  json meta;
  try {
    f >> meta;
  } catch (const json::exception& e) {
    throw std::runtime_error("model.json parse error: " + std::string(e.what()));
  }
  if (meta.value("format", "") != "profilebench-asset") {
    throw std::runtime_error("model.json: unrecognized format field");
  }

  ModelAsset asset;
  asset.name = meta.value("name", "");
  asset.version = meta.value("model_version", "");

  const int n = meta.at("counts").at("vertices").get<int>();
  const int f_count = meta.at("counts").at("faces").get<int>();
  const int s = meta.at("counts").at("shape_dim").get<int>();
  const int j = meta.at("counts").at("joints").get<int>();

  auto blob_file = [&](const char* array) {
    return root / meta.at("arrays").at(array).at("file").get<std::string>();
  };

  {
    auto data = read_blob<float>(blob_file("template_vertices"), static_cast<std::size_t>(n) * 3);
    asset.template_vertices.resize(n, 3);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < 3; ++c) asset.template_vertices(i, c) = data[static_cast<std::size_t>(i) * 3 + c];
    }
  }
  {
    auto data = read_blob<std::uint32_t>(blob_file("faces"), static_cast<std::size_t>(f_count) * 3);
    asset.faces.resize(f_count, 3);
    for (int i = 0; i < f_count; ++i) {
      for (int c = 0; c < 3; ++c) asset.faces(i, c) = static_cast<int>(data[static_cast<std::size_t>(i) * 3 + c]);
    }
  }
  {
    auto data = read_blob<float>(blob_file("shape_basis"), static_cast<std::size_t>(s) * n * 3);
    asset.shape_basis.reserve(static_cast<std::size_t>(s));
    std::size_t off = 0;
    for (int k = 0; k < s; ++k) {
      MatX3 b(n, 3);
      for (int i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) b(i, c) = data[off++];
      }
      asset.shape_basis.push_back(std::move(b));
    }
  }
  {
    auto data = read_blob<float>(blob_file("joint_regressor"), static_cast<std::size_t>(j) * n);
    asset.joint_regressor.resize(j, n);
    for (int r = 0; r < j; ++r) {
      for (int c = 0; c < n; ++c) asset.joint_regressor(r, c) = data[static_cast<std::size_t>(r) * n + c];
    }
  }
  {
    auto data = read_blob<float>(blob_file("skin_weights"), static_cast<std::size_t>(n) * j);
    asset.skin_weights.resize(n, j);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < j; ++c) asset.skin_weights(r, c) = data[static_cast<std::size_t>(r) * j + c];
    }
  }

  asset.joint_parents = meta.at("joint_parents").get<std::vector<int>>();
  if (static_cast<int>(asset.joint_parents.size()) != j) {
    throw std::runtime_error("model.json: joint_parents length does not match joint count");
  }
  for (const json& lm : meta.at("landmarks")) {
    LandmarkAnchor anchor;
    anchor.face = lm.at("face").get<int>();
    const auto& b = lm.at("bary");
    anchor.bary = Vec3(b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>());
    anchor.label = lm.value("label", "");
    anchor.contour = lm.value("contour", false);
    asset.landmarks.push_back(anchor);
  }
  asset.jawline_indices = meta.at("jawline_indices").get<std::vector<int>>();

  asset.validate();
  return asset;
}

}  // namespace profilebench
