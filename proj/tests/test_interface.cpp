#include <cmath>
#include <cstring>

#include "doctest.h"

#include "archcal/interface_law.hpp"

using namespace archcal;

namespace {

InterfaceParams weak_joint() {
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

InterfaceParams strong_joint() {
  InterfaceParams p;
  p.k_n = 90.0;
  p.k_t = 40.0;
  p.f_t = 0.26;
  p.f_c = 24.5;
  p.c = 0.40;
  p.tanphi = 0.5;
  p.tanphi_g = 0.0;
  p.G_t = 0.12;
  p.G_s = 0.125;
  p.G_c = 5.0;
  return p;
}

}  // namespace

TEST_CASE("hardened cohesion once the tension cap is consumed") {
  const InterfaceParams p = weak_joint();
  CHECK(p.q_lim() == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(p.cohesion(0.0) == doctest::Approx(0.085));
  CHECK(p.cohesion(0.12) == doctest::Approx(0.085));
  CHECK(p.cohesion(0.2) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(strong_joint().q_lim() == doctest::Approx(0.54).epsilon(1e-12));
}

TEST_CASE("literal surface values") {
  const InterfaceParams p = weak_joint();
  const SurfaceValues a = surface_values(p, 0.03, 0.0, 0.0);
  CHECK(a.F_t == doctest::Approx(-0.02).epsilon(1e-12));
  CHECK(a.F_c == doctest::Approx(-9.13).epsilon(1e-12));
  // sliding onset under 1 MPa closure
  const SurfaceValues b = surface_values(p, -1.0, 0.585, 0.0);
  CHECK(b.F_s == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("elastic steps leave the state bitwise untouched") {
  const InterfaceLaw law(weak_joint());
  InterfaceState st;
  st.q = 0.0;
  InterfaceState before = st;
  const InterfaceResult r = law.update(st, 0.0004, 0.002);  // below both caps
  CHECK(!r.plastic);
  CHECK(std::memcmp(&before, &st, sizeof(st)) == 0);
  CHECK(r.t_n == doctest::Approx(0.0004 * 60.0));
  CHECK(r.t_t == doctest::Approx(0.002 * 30.0));
}

TEST_CASE("pure opening dissipates the mode-I fracture energy") {
  const InterfaceParams p = weak_joint();
  const InterfaceLaw law(p);
  InterfaceState st;
  const int n = 1200;
  const double dmax = 7.0;
  double work = 0.0, prev_d = 0.0, prev_t = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double dn = dmax * i / n;
    const InterfaceResult r = law.update(st, dn, 0.0, false);
    work += 0.5 * (r.t_n + prev_t) * (dn - prev_d);
    prev_d = dn;
    prev_t = r.t_n;
  }
  CHECK(work == doctest::Approx(p.G_t).epsilon(0.02));
  CHECK(st.D_n > 0.99);
  CHECK(prev_t < 1e-3 * p.f_t);
}

TEST_CASE("pure sliding at zero closure dissipates the mode-II energy") {
  const InterfaceParams p = weak_joint();
  const InterfaceLaw law(p);
  InterfaceState st;
  const int n = 1500;
  const double dmax = 14.0;
  double work = 0.0, prev_d = 0.0, prev_t = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double dt = dmax * i / n;
    const InterfaceResult r = law.update(st, 0.0, dt, false);
    work += 0.5 * (r.t_t + prev_t) * (dt - prev_d);
    prev_d = dt;
    prev_t = r.t_t;
  }
  CHECK(work == doctest::Approx(p.G_s).epsilon(0.02));
  CHECK(st.D_t > 0.99);
}

TEST_CASE("exhausted joint under closure keeps exact Coulomb friction") {
  const InterfaceParams p = weak_joint();
  const InterfaceLaw law(p);
  InterfaceState st;
  const double dn = -1.0 / p.k_n;  // 1 MPa closure
  InterfaceResult r{};
  const int n = 1600;
  for (int i = 1; i <= n; ++i) r = law.update(st, dn, 16.0 * i / n, false);
  CHECK(st.D_t > 0.999);
  CHECK(r.t_n == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(r.t_t == doctest::Approx(p.tanphi * 1.0).epsilon(0.01));
  // friction work is ledgered separately and keeps growing
  CHECK(st.W_fric > p.G_s);
  CHECK(st.W_ps <= p.G_s * (1.0 + 1e-12));
}

TEST_CASE("compression cap flows without damaging the contact") {
  const InterfaceParams p = weak_joint();
  const InterfaceLaw law(p);
  InterfaceState st;
  const double dn_yield = -p.f_c / p.k_n;
  InterfaceResult r{};
  for (int i = 1; i <= 60; ++i)
    r = law.update(st, 1.4 * dn_yield * i / 60, 0.0, false);
  CHECK(r.plastic);
  CHECK(r.t_n == doctest::Approx(-p.f_c).epsilon(1e-9));
  CHECK(st.W_pc > 0.0);
  CHECK(st.D_n == 0.0);
  CHECK(st.D_t == 0.0);
  // unloading reuses the full elastic stiffness
  const InterfaceResult r2 = law.update(st, 1.4 * dn_yield + 1e-4, 0.0);
  const double dt_n = (r2.t_n - r.t_n) / 1e-4;
  CHECK(dt_n == doctest::Approx(p.k_n).epsilon(1e-6));
}

TEST_CASE("mixed opening and sliding lands on an admissible corner") {
  const InterfaceParams p = weak_joint();
  const InterfaceLaw law(p);
  InterfaceState st;
  InterfaceResult r{};
  for (int i = 1; i <= 50; ++i) r = law.update(st, 0.004 * i, 0.006 * i, false);
  CHECK(r.plastic);
  const SurfaceValues sv =
      surface_values(p, r.t_n_eff, r.t_t_eff, std::min(st.q, p.f_t));
  CHECK(sv.F_s < 1e-7);
  // runtime tensile capacity is the clamped one
  const double cap = std::max(p.f_t - st.q, 0.0);
  CHECK(r.t_n_eff < cap + 1e-7);
}

TEST_CASE("tangent agrees with an external perturbation on smooth branches") {
  const InterfaceParams p = weak_joint();
  const InterfaceLaw law(p);
  InterfaceState st;
  for (int i = 1; i <= 10; ++i) law.update(st, -0.002, 0.004 * i, false);

  InterfaceState probe = st;
  const double dn0 = -0.002, dt0 = 0.042;
  const InterfaceResult r = law.update(probe, dn0, dt0, true);
  REQUIRE(r.plastic);
  const double h = 1e-6;
  Eigen::Matrix2d fd;
  for (int j = 0; j < 2; ++j) {
    InterfaceState a = st, b = st;
    const double dnp = dn0 + (j == 0 ? h : 0.0), dtp = dt0 + (j == 1 ? h : 0.0);
    const double dnm = dn0 - (j == 0 ? h : 0.0), dtm = dt0 - (j == 1 ? h : 0.0);
    const InterfaceResult rp = law.update(a, dnp, dtp, false);
    const InterfaceResult rm = law.update(b, dnm, dtm, false);
    fd(0, j) = (rp.t_n - rm.t_n) / (2.0 * h);
    fd(1, j) = (rp.t_t - rm.t_t) / (2.0 * h);
  }
  CHECK((r.tangent - fd).norm() < 0.02 * fd.norm());
}

TEST_CASE("parameter validation") {
  InterfaceParams p = weak_joint();
  p.f_t = 0.2;  // tensile strength above c/tanphi
  CHECK_THROWS_AS(p.validate(), InputError);
  p = weak_joint();
  p.tanphi_g = 0.6;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = weak_joint();
  p.mode1_budget = 0.5;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = weak_joint();
  p.G_t = 1e-7;  // hardening modulus would dwarf the elastic stiffness
  CHECK_THROWS_AS(p.validate(), InputError);
  CHECK_NOTHROW(weak_joint().validate());
  CHECK_NOTHROW(strong_joint().validate());
}
