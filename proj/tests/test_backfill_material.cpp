#include <cmath>

#include "doctest.h"

#include "archcal/backfill_law.hpp"

using namespace archcal;

namespace {

BackfillParams fill_params() {
  BackfillParams p;
  p.E = 500.0;
  p.nu = 0.3;
  p.c_b = 0.001;
  p.tanphi_b = 0.95;
  p.tanpsi_b = 0.45;
  return p;
}

}  // namespace

TEST_CASE("plane-strain cone constants") {
  const BackfillParams p = fill_params();
  // hand-evaluated: 3 t / sqrt(9 + 12 t^2) and 3 / sqrt(9 + 12 t^2)
  CHECK(p.eta() == doctest::Approx(0.640006).epsilon(1e-5));
  CHECK(p.xi() == doctest::Approx(0.673691).epsilon(1e-5));
  CHECK(p.eta_psi() == doctest::Approx(0.399323).epsilon(1e-5));
}

TEST_CASE("pure shear strength equals xi times cohesion when flow is isochoric") {
  BackfillParams p = fill_params();
  p.tanpsi_b = 0.0;  // no dilation, so constrained shearing builds no pressure
  const BackfillLaw law(p);
  BackfillState st;
  double tau = 0.0;
  for (int i = 1; i <= 80; ++i)
    tau = law.update(st, {0, 0, 0, 2.5e-6 * i}, false).stress.xy;
  CHECK(tau == doctest::Approx(p.xi() * p.c_b).epsilon(1e-6));
  CHECK(st.diss > 0.0);
}

TEST_CASE("constrained dilation pressurises the sample and strengthens it") {
  const BackfillParams p = fill_params();
  const BackfillLaw law(p);
  BackfillState st;
  BackfillResult r{};
  for (int i = 1; i <= 80; ++i) r = law.update(st, {0, 0, 0, 2.5e-6 * i}, false);
  CHECK(r.stress.xy > 2.0 * p.xi() * p.c_b);
  CHECK(r.stress.trace() < 0.0);  // dilatant flow against fixed volume
  CHECK(law.yield_value(r.stress) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("non-associated flow controls the dilation rate") {
  const BackfillParams p = fill_params();
  const BackfillLaw law(p);
  BackfillState st;
  for (int i = 1; i <= 80; ++i) law.update(st, {0, 0, 0, 2.5e-6 * i}, false);
  const double vol = st.eps_p.trace();
  const Tensor2 devp = st.eps_p.dev();
  const double devn = std::sqrt(devp.norm2());
  REQUIRE(devn > 0.0);
  CHECK(vol / devn == doctest::Approx(std::sqrt(2.0) * p.eta_psi()).epsilon(1e-6));
}

TEST_CASE("hydrostatic tension returns to the cone apex") {
  const BackfillParams p = fill_params();
  const BackfillLaw law(p);
  BackfillState st;
  BackfillResult r{};
  for (int i = 1; i <= 40; ++i)
    r = law.update(st, {5.0e-5 * i, 5.0e-5 * i, 0, 0}, false);
  CHECK(r.plastic);
  CHECK(r.apex);
  const double papex = p.xi() * p.c_b / p.eta();
  CHECK(r.stress.xx == doctest::Approx(papex).epsilon(1e-6));
  CHECK(r.stress.yy == doctest::Approx(papex).epsilon(1e-6));
  CHECK(r.stress.zz == doctest::Approx(papex).epsilon(1e-6));
  CHECK(std::fabs(r.stress.xy) < 1e-12);
}

TEST_CASE("tangent agrees with an external perturbation") {
  const BackfillParams p = fill_params();
  const BackfillLaw law(p);
  BackfillState st;
  for (int i = 1; i <= 20; ++i) law.update(st, {0, -1e-5 * i, 0, 3e-6 * i}, false);
  BackfillState probe = st;
  const Tensor2 eps = {0, -2.2e-4, 0, 6.6e-5};
  const BackfillResult r = law.update(probe, eps, true);
  const double h = 1e-8;
  Eigen::Matrix3d fd = Eigen::Matrix3d::Zero();
  for (int j = 0; j < 3; ++j) {
    Tensor2 ep = eps, em = eps;
    if (j == 0) { ep.xx += h; em.xx -= h; }
    if (j == 1) { ep.yy += h; em.yy -= h; }
    if (j == 2) { ep.xy += 0.5 * h; em.xy -= 0.5 * h; }
    BackfillState a = st, b = st;
    const Tensor2 sp = law.update(a, ep, false).stress;
    const Tensor2 sm = law.update(b, em, false).stress;
    fd(0, j) = (sp.xx - sm.xx) / (2.0 * h);
    fd(1, j) = (sp.yy - sm.yy) / (2.0 * h);
    fd(2, j) = (sp.xy - sm.xy) / (2.0 * h);
  }
  CHECK((r.tangent - fd).norm() < 0.02 * fd.norm());
}

TEST_CASE("parameter validation") {
  BackfillParams p = fill_params();
  p.tanpsi_b = 1.2;  // dilatancy above friction
  CHECK_THROWS_AS(p.validate(), InputError);
  p = fill_params();
  p.nu = 0.5;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = fill_params();
  p.E = -1.0;
  CHECK_THROWS_AS(p.validate(), InputError);
  CHECK_NOTHROW(fill_params().validate());
}
