#include <fstream>
#include <iomanip>

#include "json.hpp"

#include "archcal/mesh_io.hpp"

namespace archcal {

using nlohmann::json;

namespace {

json geom_to_json(const ArchGeometry& g) {
  return json{{"span", g.span},
              {"rise", g.rise},
              {"thickness", g.thickness},
              {"width", g.width},
              {"ring_count", g.ring_count},
              {"brick_length", g.brick_length},
              {"brick_height", g.brick_height},
              {"joint_thickness", g.joint_thickness}};
}

ArchGeometry geom_from_json(const json& j) {
  ArchGeometry g;
  g.span = j.at("span").get<double>();
  g.rise = j.at("rise").get<double>();
  g.thickness = j.at("thickness").get<double>();
  g.width = j.at("width").get<double>();
  g.ring_count = j.at("ring_count").get<int>();
  g.brick_length = j.at("brick_length").get<double>();
  g.brick_height = j.at("brick_height").get<double>();
  g.joint_thickness = j.at("joint_thickness").get<double>();
  return g;
}

}  // namespace

void write_mesh_json(const Mesh& m, const std::string& path) {
  json j;
  j["geometry"] = geom_to_json(m.geom);
  auto& nodes = j["nodes"] = json::array();
  for (const Vec2& p : m.nodes) nodes.push_back({p.x, p.y});
  j["quads"] = m.quads;
  j["quad_group"] = m.quad_group;
  j["tris"] = m.tris;
  auto& ifs = j["interfaces"] = json::array();
  for (const auto& e : m.interfaces)
    ifs.push_back({{"n", e.n},
                   {"role", static_cast<int>(e.role)},
                   {"nx", e.nx},
                   {"ny", e.ny},
                   {"mid_angle", e.mid_angle},
                   {"mid_radius", e.mid_radius}});
  j["node_sets"] = m.node_sets;
  auto& ps = j["patches"] = json::object();
  for (const auto& [name, p] : m.patches)
    ps[name] = {{"edges", p.edges}, {"length", p.length}};
  j["extrados_edges"] = m.extrados_edges;
  j["has_backfill"] = m.has_backfill;
  j["backfill_top"] = m.backfill_top;

  std::ofstream out(path);
  if (!out) throw InputError("cannot open mesh file for writing: " + path);
  out << std::setprecision(17) << j.dump(1) << "\n";
}

Mesh read_mesh_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mesh file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("malformed mesh file " + path + ": " + e.what());
  }
  Mesh m;
  try {
    m.geom = geom_from_json(j.at("geometry"));
    for (const auto& n : j.at("nodes"))
      m.nodes.push_back({n.at(0).get<double>(), n.at(1).get<double>()});
    m.quads = j.at("quads").get<std::vector<std::array<int, 8>>>();
    m.quad_group = j.at("quad_group").get<std::vector<int>>();
    m.tris = j.at("tris").get<std::vector<std::array<int, 6>>>();
    for (const auto& e : j.at("interfaces")) {
      InterfaceElem ie;
      ie.n = e.at("n").get<std::array<int, 6>>();
      ie.role = static_cast<JointRole>(e.at("role").get<int>());
      ie.nx = e.at("nx").get<double>();
      ie.ny = e.at("ny").get<double>();
      ie.mid_angle = e.at("mid_angle").get<double>();
      ie.mid_radius = e.at("mid_radius").get<double>();
      m.interfaces.push_back(ie);
    }
    m.node_sets =
        j.at("node_sets").get<std::map<std::string, std::vector<int>>>();
    for (const auto& [name, p] : j.at("patches").items()) {
      Patch pa;
      pa.edges = p.at("edges").get<std::vector<std::array<int, 3>>>();
      pa.length = p.at("length").get<double>();
      m.patches[name] = pa;
    }
    m.extrados_edges =
        j.at("extrados_edges").get<std::vector<std::array<int, 3>>>();
    m.has_backfill = j.at("has_backfill").get<bool>();
    m.backfill_top = j.at("backfill_top").get<double>();
  } catch (const json::exception& e) {
    throw InputError("mesh file " + path + " missing fields: " + e.what());
  }
  const int nn = static_cast<int>(m.nodes.size());
  auto check = [&](int id) {
    if (id < 0 || id >= nn)
      throw InputError("mesh file references a node that does not exist");
  };
  for (const auto& q : m.quads)
    for (int id : q) check(id);
  for (const auto& t : m.tris)
    for (int id : t) check(id);
  for (const auto& e : m.interfaces)
    for (int id : e.n) check(id);
  return m;
}

void write_vtk(const Mesh& m, const std::string& path,
               const VtkOverlay* overlay) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open VTK file for writing: " + path);
  out << "# vtk DataFile Version 3.0\n";
  out << "masonry arch model\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << std::setprecision(12);
  out << "POINTS " << m.nodes.size() << " double\n";
  for (const Vec2& p : m.nodes) out << p.x << " " << p.y << " 0\n";

  const size_t ncell = m.quads.size() + m.tris.size() + m.interfaces.size();
  size_t list_len = 9 * m.quads.size() + 7 * m.tris.size() + 4 * m.interfaces.size();
  out << "CELLS " << ncell << " " << list_len << "\n";
  for (const auto& q : m.quads) {
    out << 8;
    for (int id : q) out << " " << id;
    out << "\n";
  }
  for (const auto& t : m.tris) {
    out << 6;
    for (int id : t) out << " " << id;
    out << "\n";
  }
  for (const auto& e : m.interfaces)
    out << 3 << " " << e.n[0] << " " << e.n[2] << " " << e.n[1] << "\n";
  out << "CELL_TYPES " << ncell << "\n";
  for (size_t i = 0; i < m.quads.size(); ++i) out << 23 << "\n";
  for (size_t i = 0; i < m.tris.size(); ++i) out << 22 << "\n";
  for (size_t i = 0; i < m.interfaces.size(); ++i) out << 21 << "\n";

  out << "CELL_DATA " << ncell << "\n";
  out << "SCALARS region int 1\nLOOKUP_TABLE default\n";
  for (int grp : m.quad_group) out << grp << "\n";
  for (size_t i = 0; i < m.tris.size(); ++i) out << 10 << "\n";
  for (const auto& e : m.interfaces) out << 20 + static_cast<int>(e.role) << "\n";
  if (overlay)
    for (const auto& [name, vals] : overlay->cell_scalars) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (size_t i = 0; i < ncell; ++i)
        out << (i < vals.size() ? vals[i] : 0.0) << "\n";
    }
  if (overlay && !overlay->point_vectors.empty()) {
    out << "POINT_DATA " << m.nodes.size() << "\n";
    for (const auto& [name, vals] : overlay->point_vectors) {
      out << "VECTORS " << name << " double\n";
      for (size_t i = 0; i < m.nodes.size(); ++i) {
        const Vec2 v = i < vals.size() ? vals[i] : Vec2{};
        out << v.x << " " << v.y << " 0\n";
      }
    }
  }
}

}  // namespace archcal
