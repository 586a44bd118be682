// Solution-driver checks: linear consistency against a one-shot direct
// solve, bitwise determinism, invariant bookkeeping on a nonlinear run,
// failure classification on synthetic damage fields, and the error paths.
#include <Eigen/SparseLU>
#include <cmath>
#include <cstring>
#include <vector>

#include "archcal/mesh.hpp"
#include "archcal/solve.hpp"
#include "archcal/system.hpp"
#include "doctest.h"

using namespace archcal;

namespace {

ArchGeometry tiny_geom() {
  ArchGeometry g;
  g.span = 1000.0;
  g.rise = 250.0;
  g.thickness = 120.0;
  g.width = 675.0;
  g.ring_count = 2;
  g.brick_length = 200.0;
  g.brick_height = 55.0;
  g.joint_thickness = 10.0;
  return g;
}

ArchGeometry paper_geom() {
  ArchGeometry g;
  g.span = 5000.0;
  g.rise = 1250.0;
  g.thickness = 330.0;
  g.width = 675.0;
  g.ring_count = 3;
  g.brick_length = 215.0;
  g.brick_height = 100.0;
  g.joint_thickness = 10.0;
  return g;
}

InterfaceParams weak_mortar() {
  InterfaceParams p;
  p.k_n = 60.0;
  p.k_t = 30.0;
  p.f_t = 0.05;
  p.f_c = 9.1;
  p.c = 0.085;
  p.tanphi = 0.5;
  p.tanphi_g = 0.0;
  p.G_t = 0.02;
  p.G_s = 0.125;
  p.G_c = 5.0;
  return p;
}

// Strengths far above the applied stress level so the joints stay elastic,
// but still inside the law's admissible (snapback-free) parameter range.
InterfaceParams elastic_mortar() {
  InterfaceParams p = weak_mortar();
  p.f_t = 50.0;
  p.f_c = 1e4;
  p.c = 50.0;
  p.G_t = 100.0;
  p.G_s = 100.0;
  p.G_c = 1e6;
  return p;
}

MaterialSet tiny_meso(const InterfaceParams& mortar) {
  MaterialSet m;
  m.tier = Tier::kMeso;
  m.brick = {6000.0, 0.15};
  m.mortar = mortar;
  return m;
}

Mesh tiny_mesh() {
  MesoOptions opt;
  opt.columns_per_brick = 2;
  opt.rows_per_ring = 2;
  opt.patch_length = 100.0;
  return generate_mesoscale(tiny_geom(), opt);
}

FeModel supported_model(const Mesh& mesh, const MaterialSet& mats) {
  FeModel fm(mesh, mats);
  fm.fix_set("springing_left", true, true);
  fm.fix_set("springing_right", true, true);
  return fm;
}

}  // namespace

TEST_CASE("elastic run reproduces a direct linear solve") {
  const Mesh mesh = tiny_mesh();
  const MaterialSet mats = tiny_meso(elastic_mortar());

  LoadProtocol proto;
  proto.gravity_on = false;
  proto.preloads = {{"quarter", 0.01, 1}};
  proto.controlled_patch = "quarter";
  proto.max_steps = 0;
  FeModel fm = supported_model(mesh, mats);
  const RunResult run = solve_quasi_static(fm, proto);
  REQUIRE(run.trace.size() == 1);
  CHECK(run.trace[0].time_s == 0.0);

  FeModel ref = supported_model(mesh, mats);
  ref.tie_patch("quarter");
  ref.finalize();
  GpStates base = ref.make_states(), trial = ref.make_states();
  Eigen::VectorXd fi;
  std::vector<Eigen::Triplet<double>> tr;
  Eigen::VectorXd u0 = Eigen::VectorXd::Zero(mesh.dof_count());
  ref.evaluate(u0, base, trial, fi, &tr);
  Eigen::SparseMatrix<double> k(ref.n_eq(), ref.n_eq());
  k.setFromTriplets(tr.begin(), tr.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(k);
  REQUIRE(lu.info() == Eigen::Success);
  Eigen::VectorXd fe = Eigen::VectorXd::Zero(ref.n_eq());
  fe[ref.platen("quarter")] = -0.01;
  const Eigen::VectorXd du = lu.solve(fe);
  Eigen::VectorXd u_lin = u0;
  ref.add_spread(du, 1.0, u_lin);

  CHECK((run.u - u_lin).norm() <= 1e-8 * u_lin.norm());
}

TEST_CASE("repeated runs are bit-identical") {
  const Mesh mesh = tiny_mesh();
  const MaterialSet mats = tiny_meso(weak_mortar());
  LoadProtocol proto;
  proto.gravity_on = true;
  proto.gamma_arch = 16.0;
  proto.preloads = {{"quarter", 5.0, 3}, {"three_quarter", 5.0, 3}};
  proto.controlled_patch = "quarter";
  proto.control_rate = 0.2;
  proto.max_steps = 8;

  auto run_once = [&] {
    FeModel fm = supported_model(mesh, mats);
    return solve_quasi_static(fm, proto);
  };
  const RunResult a = run_once();
  const RunResult b = run_once();
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].step == b.trace[i].step);
    CHECK(a.trace[i].time_s == b.trace[i].time_s);
    CHECK(a.trace[i].F_kN_per_m == b.trace[i].F_kN_per_m);
    CHECK(a.trace[i].d1_mm == b.trace[i].d1_mm);
    CHECK(a.trace[i].d2_mm == b.trace[i].d2_mm);
  }
  REQUIRE(a.u.size() == b.u.size());
  CHECK(std::memcmp(a.u.data(), b.u.data(), a.u.size() * sizeof(double)) == 0);
}

TEST_CASE("nonlinear run keeps its bookkeeping invariants") {
  const Mesh mesh = tiny_mesh();
  const MaterialSet mats = tiny_meso(weak_mortar());
  LoadProtocol proto;
  proto.gravity_on = true;
  proto.gamma_arch = 16.0;
  proto.preloads = {{"quarter", 3.0, 3}, {"three_quarter", 3.0, 3}};
  proto.controlled_patch = "quarter";
  proto.control_rate = 0.25;
  proto.max_steps = 30;
  proto.displacement_cap = 6.0;

  int callbacks = 0;
  FeModel fm = supported_model(mesh, mats);
  const RunResult run = solve_quasi_static(
      fm, proto, [&](int, const Eigen::VectorXd&, const GpStates&) { ++callbacks; });

  REQUIRE(run.trace.size() >= 4);
  for (size_t i = 1; i < run.trace.size(); ++i)
    CHECK(run.trace[i].time_s > run.trace[i - 1].time_s);
  for (const auto& lg : run.log) CHECK(lg.iterations <= 60);
  CHECK(run.dissipated >= 0.0);
  CHECK(run.peak_F > 0.0);
  CHECK(callbacks >= 1);
  CHECK(!run.termination.empty());
  CHECK(!run.failure_label.empty());
  // Partition resultants cover both tied patches at every recorded step.
  REQUIRE(run.partition_names.size() == 2);
  for (const auto& pr : run.partitions) {
    REQUIRE(pr.force.size() == 2);
    REQUIRE(pr.disp.size() == 2);
  }
  // Stage-2 rows start after the preload rows and carry positive time.
  bool seen_positive = false;
  for (const auto& row : run.trace) {
    if (row.time_s > 0.0) seen_positive = true;
    if (seen_positive) CHECK(row.time_s > 0.0);
  }
}

TEST_CASE("classifier labels synthetic damage fields") {
  const Mesh mesh = generate_mesoscale(paper_geom());
  const MaterialSet mats = tiny_meso(weak_mortar());
  FeModel fm(mesh, mats);

  SUBCASE("saturated ring joints give ring_sliding") {
    GpStates s = fm.make_states();
    int flipped = 0, total = 0;
    for (size_t e = 0; e < mesh.interfaces.size(); ++e) {
      if (mesh.interfaces[e].role != JointRole::kCircumferential) continue;
      total += 2;
      if (e % 2 == 0) continue;  // damage roughly half of them
      for (int i = 0; i < 2; ++i) s.joint[e * 2 + i].D_t = 0.95;
      flipped += 2;
    }
    REQUIRE(flipped >= static_cast<int>(0.3 * total));
    CHECK(classify_failure(fm, s, "quarter") == "ring_sliding");
  }

  SUBCASE("four through-thickness crack groups give flexural_hinges") {
    GpStates s = fm.make_states();
    const double targets[4] = {-0.5, -0.2, 0.1, 0.4};
    for (size_t e = 0; e < mesh.interfaces.size(); ++e) {
      const auto& ie = mesh.interfaces[e];
      if (ie.role != JointRole::kRadial) continue;
      for (double t : targets)
        if (std::fabs(ie.mid_angle - t) < 0.04)
          for (int i = 0; i < 2; ++i) s.joint[e * 2 + i].D_n = 0.95;
    }
    CHECK(classify_failure(fm, s, "quarter") == "flexural_hinges");
  }

  SUBCASE("no damage gives mixed") {
    GpStates s = fm.make_states();
    CHECK(classify_failure(fm, s, "quarter") == "mixed");
  }
}

TEST_CASE("continuum damage under the load patch gives punching") {
  MacroOptions opt;
  ContinuumParams cp;
  cp.E = 2571.43;
  cp.nu = 0.15;
  cp.f_t = 0.05;
  cp.f_c_max = 9.1;
  cp.G_t = 0.02;
  MaterialSet mats;
  mats.tier = Tier::kMacro;
  mats.masonry = cp;
  const Mesh mesh = generate_macroscale(paper_geom(), opt);
  FeModel fm(mesh, mats);

  const Patch& patch = mesh.patches.at("quarter");
  Vec2 pc{0.0, 0.0};
  int n = 0;
  for (const auto& e : patch.edges)
    for (int a = 0; a < 3; ++a) {
      pc.x += mesh.nodes[e[a]].x;
      pc.y += mesh.nodes[e[a]].y;
      ++n;
    }
  pc.x /= n;
  pc.y /= n;
  GpStates s = fm.make_states();
  for (size_t i = 0; i < s.solid.size(); ++i) {
    const Vec2 p = fm.solid_gp_pos()[i];
    if (std::hypot(p.x - pc.x, p.y - pc.y) < 260.0) s.solid[i].d = 0.9;
  }
  CHECK(classify_failure(fm, s, "quarter") == "punching");
}

TEST_CASE("solver error paths") {
  const Mesh mesh = tiny_mesh();
  const MaterialSet mats = tiny_meso(weak_mortar());

  SUBCASE("unknown controlled patch is rejected") {
    LoadProtocol proto;
    proto.controlled_patch = "nowhere";
    FeModel fm = supported_model(mesh, mats);
    CHECK_THROWS_AS(solve_quasi_static(fm, proto), InputError);
  }

  SUBCASE("missing supports give a singular first solve") {
    LoadProtocol proto;
    proto.gravity_on = false;
    proto.preloads = {{"quarter", 0.01, 1}};
    proto.controlled_patch = "quarter";
    proto.max_steps = 0;
    FeModel fm(mesh, mats);  // nothing fixed
    CHECK_THROWS_AS(solve_quasi_static(fm, proto), IllPosedSystem);
  }

  SUBCASE("unsupportable preload diverges in stage 1") {
    LoadProtocol proto;
    proto.gravity_on = false;
    proto.preloads = {{"quarter", 1e5, 2}};
    proto.controlled_patch = "quarter";
    proto.max_steps = 0;
    FeModel fm = supported_model(mesh, mats);
    CHECK_THROWS_AS(solve_quasi_static(fm, proto), PreloadDivergence);
  }
}
