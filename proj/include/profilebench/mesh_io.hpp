#pragma once

#include <string>

#include "profilebench/model.hpp"

namespace profilebench {

// Wavefront OBJ, vertices and triangular faces only.
void write_obj(const std::string& path, const Mesh& mesh);
Mesh read_obj(const std::string& path);

}  // namespace profilebench
