#include <cmath>

#include "doctest.h"

#include "archcal/geometry.hpp"

using namespace archcal;

namespace {

ArchGeometry standard_arch() {
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

}  // namespace

TEST_CASE("centerline circle through springings and crown") {
  const ArchGeometry g = standard_arch();
  // independent: R = (L^2/4 + f^2) / (2 f)
  const double R = (5000.0 * 5000.0 / 4.0 + 1250.0 * 1250.0) / (2.0 * 1250.0);
  CHECK(g.centerline_radius() == doctest::Approx(R).epsilon(1e-12));
  CHECK(R == doctest::Approx(3125.0));
  CHECK(g.center().x == doctest::Approx(2500.0));
  CHECK(g.center().y == doctest::Approx(1250.0 - 3125.0));
  // both defining points really sit on the circle
  const Vec2 c = g.center();
  CHECK(std::hypot(0.0 - c.x, 0.0 - c.y) == doctest::Approx(R).epsilon(1e-12));
  CHECK(std::hypot(2500.0 - c.x, 1250.0 - c.y) == doctest::Approx(R).epsilon(1e-12));
}

TEST_CASE("half angle and radial extents") {
  const ArchGeometry g = standard_arch();
  CHECK(g.half_angle() == doctest::Approx(std::asin(0.8)).epsilon(1e-14));
  CHECK(g.intrados_radius() == doctest::Approx(2960.0));
  CHECK(g.extrados_radius() == doctest::Approx(3290.0));
}

TEST_CASE("rings tile the thickness with shared faces") {
  const ArchGeometry g = standard_arch();
  CHECK(g.ring_inner_radius(1) == doctest::Approx(2960.0));
  CHECK(g.ring_outer_radius(1) == doctest::Approx(g.ring_inner_radius(2)));
  CHECK(g.ring_outer_radius(2) == doctest::Approx(g.ring_inner_radius(3)));
  CHECK(g.ring_outer_radius(3) == doctest::Approx(3290.0));
  CHECK(g.ring_mid_radius(1) == doctest::Approx(3015.0));
  CHECK(g.ring_mid_radius(2) == doctest::Approx(3125.0));
  CHECK(g.ring_mid_radius(3) == doctest::Approx(3235.0));
}

TEST_CASE("nominal brick height adjustment fills the barrel") {
  const ArchGeometry g = standard_arch();
  const double h = g.adjusted_brick_height();
  CHECK(g.ring_count * h + (g.ring_count - 1) * g.joint_thickness ==
        doctest::Approx(g.thickness).epsilon(1e-12));
}

TEST_CASE("points and angles") {
  const ArchGeometry g = standard_arch();
  const Vec2 crown = g.point(g.centerline_radius(), 0.0);
  CHECK(crown.x == doctest::Approx(2500.0));
  CHECK(crown.y == doctest::Approx(1250.0));
  const Vec2 left = g.point(g.centerline_radius(), -g.half_angle());
  CHECK(left.x == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(left.y == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(g.angle_at_x(1250.0) == doctest::Approx(std::asin(-0.4)).epsilon(1e-14));
  CHECK(g.angle_at_x(2500.0) == doctest::Approx(0.0));
}

TEST_CASE("arc lengths and barrel area") {
  const ArchGeometry g = standard_arch();
  const double th = std::asin(0.8);
  CHECK(g.arc_length(3125.0) == doctest::Approx(2.0 * th * 3125.0).epsilon(1e-12));
  CHECK(g.barrel_area() ==
        doctest::Approx(th * (3290.0 * 3290.0 - 2960.0 * 2960.0)).epsilon(1e-12));
}

TEST_CASE("geometry validation rejects nonsense") {
  ArchGeometry g = standard_arch();
  g.span = -1.0;
  CHECK_THROWS_AS(g.validate(), InputError);
  g = standard_arch();
  g.rise = 2600.0;  // beyond a half circle
  CHECK_THROWS_AS(g.validate(), InputError);
  g = standard_arch();
  g.ring_count = 0;
  CHECK_THROWS_AS(g.validate(), InputError);
  g = standard_arch();
  g.ring_count = 30;
  g.joint_thickness = 12.0;  // joint stack exceeds the thickness
  CHECK_THROWS_AS(g.validate(), InputError);
  CHECK_NOTHROW(standard_arch().validate());
}
