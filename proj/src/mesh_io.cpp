#include "profilebench/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace profilebench {

void write_obj(const std::string& path, const Mesh& mesh) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_obj: cannot open " + path);
  char line[128];
  for (long i = 0; i < mesh.vertices.rows(); ++i) {
    std::snprintf(line, sizeof(line), "v %.17g %.17g %.17g\n", mesh.vertices(i, 0),
                  mesh.vertices(i, 1), mesh.vertices(i, 2));
    f << line;
  }
  for (long i = 0; i < mesh.faces.rows(); ++i) {
    f << "f " << mesh.faces(i, 0) + 1 << " " << mesh.faces(i, 1) + 1 << " "
      << mesh.faces(i, 2) + 1 << "\n";
  }
  if (!f) throw std::runtime_error("write_obj: short write to " + path);
}

Mesh read_obj(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_obj: cannot open " + path);

  std::vector<Vec3> vertices;
  std::vector<Eigen::Vector3i> faces;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      Vec3 v;
      if (!(ss >> v[0] >> v[1] >> v[2])) {
        throw std::runtime_error("read_obj: bad vertex at line " + std::to_string(line_no));
      }
      vertices.push_back(v);
    } else if (tag == "f") {
      Eigen::Vector3i face;
      for (int c = 0; c < 3; ++c) {
        std::string tok;
        if (!(ss >> tok)) {
          throw std::runtime_error("read_obj: non-triangular face at line " +
                                   std::to_string(line_no));
        }
        // Accept "v", "v/t", "v/t/n", "v//n" forms; only the index matters.
        face[c] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
      }
      std::string extra;
      if (ss >> extra) {
        throw std::runtime_error("read_obj: non-triangular face at line " +
                                 std::to_string(line_no));
      }
      faces.push_back(face);
    }
  }

  Mesh mesh;
  mesh.vertices.resize(static_cast<long>(vertices.size()), 3);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    mesh.vertices.row(static_cast<long>(i)) = vertices[i].transpose();
  }
  mesh.faces.resize(static_cast<long>(faces.size()), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const int v = faces[i][c];
      if (v < 0 || v >= static_cast<int>(vertices.size())) {
        throw std::runtime_error("read_obj: face index out of range");
      }
      mesh.faces(static_cast<long>(i), c) = v;
    }
  }
  return mesh;
}

}  // namespace profilebench
