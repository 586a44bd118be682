#pragma once
// Mesh exchange: JSON for lossless round-trips between tools, legacy ASCII
// VTK for external viewers.  VTK output may carry nodal vectors and per-cell
// scalars (cells ordered quads, then triangles, then interfaces).

#include <map>
#include <string>
#include <vector>

#include "archcal/mesh.hpp"

namespace archcal {

struct VtkOverlay {
  std::map<std::string, std::vector<Vec2>> point_vectors;
  std::map<std::string, std::vector<double>> cell_scalars;
};

void write_mesh_json(const Mesh& mesh, const std::string& path);
Mesh read_mesh_json(const std::string& path);

void write_vtk(const Mesh& mesh, const std::string& path,
               const VtkOverlay* overlay = nullptr);

}  // namespace archcal
