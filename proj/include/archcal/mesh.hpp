#pragma once
// Mesh container shared by all modelling tiers.  Solid elements are 8-node
// quadrilaterals (masonry) and 6-node triangles (backfill); joints are
// zero-thickness quadratic line interfaces with three coincident node pairs.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "archcal/geometry.hpp"

namespace archcal {

enum class JointRole : int {
  kRadial = 0,         // head joints between bricks of one ring
  kCircumferential = 1,  // bed joints between rings (or the hybrid mid-layer)
  kExtradosBond = 2,   // arch-to-backfill bond
};

struct InterfaceElem {
  // Bottom chain then top chain; pair i is (n[i], n[i+3]) and both nodes
  // coincide geometrically.
  std::array<int, 6> n{};
  JointRole role = JointRole::kRadial;
  double nx = 0.0, ny = 0.0;  // reference normal, bottom side towards top side
  double mid_angle = 0.0;     // crown-relative angle of the element midpoint
  double mid_radius = 0.0;
};

struct Patch {
  std::vector<std::array<int, 3>> edges;  // quadratic boundary edges
  double length = 0.0;                    // summed edge length, mm
};

struct Mesh {
  ArchGeometry geom;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 8>> quads;
  std::vector<int> quad_group;  // 0 = masonry solid
  std::vector<std::array<int, 6>> tris;  // backfill only
  std::vector<InterfaceElem> interfaces;
  std::map<std::string, std::vector<int>> node_sets;
  std::map<std::string, Patch> patches;
  // Outer boundary of the barrel, ordered left to right; backfill attachment
  // and load patches both key off this.
  std::vector<std::array<int, 3>> extrados_edges;
  bool has_backfill = false;
  double backfill_top = 0.0;

  int dof_count() const { return 2 * static_cast<int>(nodes.size()); }
  int count_interfaces(JointRole role) const {
    int n = 0;
    for (const auto& e : interfaces)
      if (e.role == role) ++n;
    return n;
  }
};

struct MesoOptions {
  int columns_per_brick = 4;  // angular lattice density
  int rows_per_ring = 4;
  double patch_length = 210.0;  // extrados load patches, mm
};

struct MacroOptions {
  int n_len = 40;
  int n_thk = 2;
  bool hybrid = false;
  double patch_length = 210.0;
};

struct BackfillOptions {
  double horiz_extent = 2460.0;  // beyond each springing, mm
  double cover = 300.0;          // above the crown centerline + t/2, mm
  double crest_patch_length = 400.0;
  double ground_spacing = 200.0;  // column spacing outside the arch, mm
  int layers = 5;
};

// Multi-ring mesh with every brick and mortar joint resolved.  Radial joint
// counts follow round(ring centerline arc / (brick length + joint)); adjacent
// rings are staggered by half a brick.
Mesh generate_mesoscale(const ArchGeometry& g, const MesoOptions& opt = {});

// Single homogenised barrel; with `hybrid` a mid-thickness interface layer
// splits the barrel into two element rows of rings.
Mesh generate_macroscale(const ArchGeometry& g, const MacroOptions& opt = {});

// Appends the fill above the extrados: vertical sides, flat top, triangulated
// interior, bond interfaces along the whole extrados.
void attach_backfill(Mesh& mesh, const BackfillOptions& opt = {});

// Number of radial joints the generator must produce for ring k (1-based).
int expected_radial_joints(const ArchGeometry& g, int ring);

// Throws unless every solid element has a strictly positive Jacobian at all
// of its quadrature points.
void check_element_quality(const Mesh& mesh);

}  // namespace archcal
