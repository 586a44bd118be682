// Assembly-level oracles: constant-strain patch test on a distorted grid,
// slender cantilever against shear-corrected beam theory, and a stiff
// interface against a conforming mesh.
#include <Eigen/SparseLU>
#include <array>
#include <cmath>
#include <vector>

#include "archcal/elements.hpp"
#include "archcal/system.hpp"
#include "doctest.h"

using namespace archcal;

namespace {

// Rectangular block of quad8 elements; corners first, then horizontal and
// vertical midside nodes.
struct Grid {
  Mesh mesh;
  int nx, ny;
  double lx, ly;
  int corner(int i, int j) const { return j * (nx + 1) + i; }
  int hmid(int i, int j) const { return (nx + 1) * (ny + 1) + j * nx + i; }
  int vmid(int i, int j) const {
    return (nx + 1) * (ny + 1) + (ny + 1) * nx + j * (nx + 1) + i;
  }
};

Grid make_grid(int nx, int ny, double lx, double ly, int node_offset = 0) {
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.lx = lx;
  g.ly = ly;
  Mesh& m = g.mesh;
  m.nodes.assign(node_offset, Vec2{0.0, 0.0});
  const double dx = lx / nx, dy = ly / ny;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.nodes.push_back({i * dx, j * dy});
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) m.nodes.push_back({(i + 0.5) * dx, j * dy});
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) m.nodes.push_back({i * dx, (j + 0.5) * dy});
  const int off = node_offset;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.quads.push_back({off + g.corner(i, j), off + g.corner(i + 1, j),
                         off + g.corner(i + 1, j + 1), off + g.corner(i, j + 1),
                         off + g.hmid(i, j), off + g.vmid(i + 1, j),
                         off + g.hmid(i, j + 1), off + g.vmid(i, j)});
      m.quad_group.push_back(0);
    }
  return g;
}

// Re-centres every midside node between its edge corners (straight edges).
void straighten(Grid& g, int off = 0) {
  Mesh& m = g.mesh;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 a = m.nodes[off + g.corner(i, j)];
      const Vec2 b = m.nodes[off + g.corner(i + 1, j)];
      m.nodes[off + g.hmid(i, j)] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const Vec2 a = m.nodes[off + g.corner(i, j)];
      const Vec2 b = m.nodes[off + g.corner(i, j + 1)];
      m.nodes[off + g.vmid(i, j)] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    }
}

MaterialSet elastic_mats(double e, double nu) {
  MaterialSet m;
  m.tier = Tier::kMeso;
  m.brick = {e, nu};
  return m;
}

// Solves K u = f for an elastic model at u = 0 and returns the full vector.
Eigen::VectorXd linear_solve(FeModel& fm, const Eigen::VectorXd& f_ext_red) {
  GpStates base = fm.make_states(), trial = fm.make_states();
  Eigen::VectorXd fi;
  std::vector<Eigen::Triplet<double>> tr;
  Eigen::VectorXd u0 = Eigen::VectorXd::Zero(fm.mesh().dof_count());
  fm.evaluate(u0, base, trial, fi, &tr);
  Eigen::SparseMatrix<double> k(fm.n_eq(), fm.n_eq());
  k.setFromTriplets(tr.begin(), tr.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(k);
  REQUIRE(lu.info() == Eigen::Success);
  const Eigen::VectorXd du = lu.solve(f_ext_red);
  Eigen::VectorXd u = u0;
  fm.add_spread(du, 1.0, u);
  return u;
}

}  // namespace

TEST_CASE("uniform strain on a distorted grid is reproduced exactly") {
  Grid g = make_grid(2, 2, 100.0, 80.0);
  // Distort the interior corner and keep the edges straight.
  g.mesh.nodes[g.corner(1, 1)] = {57.0, 33.5};
  g.mesh.nodes[g.corner(1, 0)].x = 44.0;
  g.mesh.nodes[g.corner(0, 1)].y = 47.0;
  g.mesh.nodes[g.corner(2, 1)].y = 36.0;
  g.mesh.nodes[g.corner(1, 2)].x = 61.0;
  straighten(g);
  FeModel fm(g.mesh, elastic_mats(2800.0, 0.25));
  fm.finalize();

  const double b11 = 4e-4, b12 = -2.5e-4, b21 = 1.5e-4, b22 = -3e-4;
  Eigen::VectorXd u(fm.mesh().dof_count());
  for (size_t n = 0; n < fm.mesh().nodes.size(); ++n) {
    const Vec2 p = fm.mesh().nodes[n];
    u[2 * n] = 1e-3 + b11 * p.x + b12 * p.y;
    u[2 * n + 1] = -2e-3 + b21 * p.x + b22 * p.y;
  }
  GpStates base = fm.make_states(), trial = fm.make_states();
  Eigen::VectorXd fi;
  fm.evaluate(u, base, trial, fi, nullptr);

  const double scale = fi.cwiseAbs().maxCoeff();
  CHECK(scale > 0.0);
  // Interior nodes must be in equilibrium under the constant stress field.
  const int interior[5] = {g.corner(1, 1), g.hmid(0, 1), g.hmid(1, 1),
                           g.vmid(1, 0), g.vmid(1, 1)};
  for (int n : interior) {
    CHECK(std::fabs(fi[2 * n]) <= 1e-11 * scale);
    CHECK(std::fabs(fi[2 * n + 1]) <= 1e-11 * scale);
  }
  // And the whole vector must be self-equilibrated.
  double sx = 0.0, sy = 0.0;
  for (int d = 0; d < fi.size(); d += 2) {
    sx += fi[d];
    sy += fi[d + 1];
  }
  CHECK(std::fabs(sx) <= 1e-11 * scale);
  CHECK(std::fabs(sy) <= 1e-11 * scale);

  // Constant stress: equal von Mises in every element.
  const auto cf = fm.cell_fields(u, base);
  for (double v : cf.von_mises) CHECK(v == doctest::Approx(cf.von_mises[0]).epsilon(1e-12));
}

TEST_CASE("consistent self weight integrates to the exact block weight") {
  Grid g = make_grid(2, 2, 100.0, 80.0);
  g.mesh.nodes[g.corner(1, 1)] = {57.0, 33.5};
  straighten(g);
  FeModel fm(g.mesh, elastic_mats(2800.0, 0.25));
  double wy = 0.0;
  for (int d = 1; d < fm.mesh().dof_count(); d += 2)
    wy += fm.gravity_arch_unit()[d];
  // Straight-edged quads: shoelace over the corner polygon is exact.
  auto tri_area = [&](int a, int b, int c) {
    const Vec2 pa = g.mesh.nodes[a], pb = g.mesh.nodes[b], pc = g.mesh.nodes[c];
    return 0.5 * ((pb.x - pa.x) * (pc.y - pa.y) - (pc.x - pa.x) * (pb.y - pa.y));
  };
  double area = 0.0;
  for (const auto& q : g.mesh.quads)
    area += tri_area(q[0], q[1], q[2]) + tri_area(q[0], q[2], q[3]);
  CHECK(wy == doctest::Approx(-1e-6 * area).epsilon(1e-12));
}

TEST_CASE("interface stations carry unit frames and trapezoid weights") {
  const auto st =
      interface_stations(Vec2{0.0, 0.0}, Vec2{6.0, 8.0}, Vec2{0.8, -0.6});
  double total = 0.0;
  for (const auto& s : st) {
    CHECK(std::hypot(s.normal.x, s.normal.y) == doctest::Approx(1.0));
    CHECK(std::hypot(s.tangent.x, s.tangent.y) == doctest::Approx(1.0));
    CHECK(s.normal.x * 0.8 - s.normal.y * 0.6 > 0.0);
    CHECK(s.normal.x * s.tangent.x + s.normal.y * s.tangent.y ==
          doctest::Approx(0.0));
    total += s.weight;
  }
  CHECK(total == doctest::Approx(10.0).epsilon(1e-12));  // chain length
}

TEST_CASE("slender cantilever tip deflection matches beam theory") {
  const double L = 1000.0, h = 100.0, E = 3000.0, P = 10.0;
  Grid g = make_grid(10, 1, L, h);
  Mesh mesh = g.mesh;
  std::vector<int>& root = mesh.node_sets["root"];
  root = {g.corner(0, 0), g.corner(0, 1), g.vmid(0, 0)};
  FeModel fm(mesh, elastic_mats(E, 0.0));
  fm.fix_set("root", true, true);
  fm.finalize();

  Eigen::VectorXd f = Eigen::VectorXd::Zero(fm.n_eq());
  // Tip shear spread consistently over the end face (corner, mid, corner).
  const int tip[3] = {g.corner(10, 0), g.vmid(10, 0), g.corner(10, 1)};
  const double wts[3] = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
  for (int i = 0; i < 3; ++i) f[fm.eq(tip[i], 1)] -= P * wts[i];
  const Eigen::VectorXd u = linear_solve(fm, f);

  const double tip_defl = -u[2 * g.vmid(10, 0) + 1];
  const double inertia = h * h * h / 12.0;
  const double shear_mod = E / 2.0;  // nu = 0
  const double oracle =
      P * L * L * L / (3.0 * E * inertia) + 6.0 * P * L / (5.0 * shear_mod * h);
  CHECK(tip_defl == doctest::Approx(oracle).epsilon(0.03));
}

TEST_CASE("stiff interface reproduces the conforming mesh") {
  const double E = 3000.0, cell = 100.0, P = 5.0;

  // Conforming reference: two elements in a row.
  Grid ref = make_grid(2, 1, 2.0 * cell, cell);
  Mesh mref = ref.mesh;
  mref.node_sets["root"] = {ref.corner(0, 0), ref.corner(0, 1), ref.vmid(0, 0)};
  FeModel fref(mref, elastic_mats(E, 0.15));
  fref.fix_set("root", true, true);
  fref.finalize();
  Eigen::VectorXd f1 = Eigen::VectorXd::Zero(fref.n_eq());
  f1[fref.eq(ref.vmid(2, 0), 1)] -= P;
  const Eigen::VectorXd u1 = linear_solve(fref, f1);
  const double tip1 = -u1[2 * ref.vmid(2, 0) + 1];

  // Split mesh: element 2 shifted to fresh nodes, glued by one interface.
  Grid a = make_grid(1, 1, cell, cell);
  Mesh m2 = a.mesh;
  const int offb = static_cast<int>(m2.nodes.size());
  Grid b = make_grid(1, 1, cell, cell, offb);
  for (size_t n = offb; n < b.mesh.nodes.size(); ++n) {
    Vec2 p = b.mesh.nodes[n];
    m2.nodes.push_back({p.x + cell, p.y});
  }
  m2.quads.push_back(b.mesh.quads[0]);
  m2.quad_group.push_back(0);
  InterfaceElem ie;
  ie.n = {a.corner(1, 0), a.vmid(1, 0), a.corner(1, 1),
          offb + b.corner(0, 0), offb + b.vmid(0, 0), offb + b.corner(0, 1)};
  ie.role = JointRole::kRadial;
  ie.nx = 1.0;
  ie.ny = 0.0;
  m2.interfaces.push_back(ie);
  m2.node_sets["root"] = {a.corner(0, 0), a.corner(0, 1), a.vmid(0, 0)};

  MaterialSet mats = elastic_mats(E, 0.15);
  mats.mortar.k_n = 100.0 * E / cell;
  mats.mortar.k_t = 100.0 * E / cell;
  mats.mortar.f_t = 1e6;
  mats.mortar.f_c = 1e9;
  mats.mortar.c = 1e6;
  mats.mortar.tanphi = 0.5;
  mats.mortar.tanphi_g = 0.0;
  mats.mortar.G_t = 1e8;
  mats.mortar.G_s = 1e8;
  mats.mortar.G_c = 1e8;
  FeModel fsplit(m2, mats);
  fsplit.fix_set("root", true, true);
  fsplit.finalize();
  Eigen::VectorXd f2 = Eigen::VectorXd::Zero(fsplit.n_eq());
  f2[fsplit.eq(offb + b.vmid(1, 0), 1)] -= P;
  const Eigen::VectorXd u2 = linear_solve(fsplit, f2);
  const double tip2 = -u2[2 * (offb + b.vmid(1, 0)) + 1];

  CHECK(tip2 == doctest::Approx(tip1).epsilon(0.005));
}
