#include "archcal/geometry.hpp"

#include <cmath>

namespace archcal {

void ArchGeometry::validate() const {
  if (span <= 0.0 || rise <= 0.0 || thickness <= 0.0 || width <= 0.0)
    throw InputError("arch geometry: span, rise, thickness and width must be positive");
  if (rise > 0.5 * span)
    throw InputError("arch geometry: rise must not exceed span/2 (circular segment)");
  if (ring_count < 1) throw InputError("arch geometry: ring_count must be >= 1");
  if (brick_length <= 0.0 || brick_height <= 0.0)
    throw InputError("arch geometry: brick dimensions must be positive");
  if (joint_thickness < 0.0)
    throw InputError("arch geometry: joint thickness must be non-negative");
  if (thickness <= (ring_count - 1) * joint_thickness)
    throw InputError("arch geometry: thickness too small for the joint stack");
  if (intrados_radius() <= 0.0)
    throw InputError("arch geometry: intrados radius must stay positive");
}

double ArchGeometry::half_angle() const {
  const double s = 0.5 * span / centerline_radius();
  return std::asin(std::min(1.0, std::max(-1.0, s)));
}

Vec2 ArchGeometry::point(double r, double phi) const {
  const Vec2 c = center();
  return {c.x + r * std::sin(phi), c.y + r * std::cos(phi)};
}

double ArchGeometry::angle_at_x(double x) const {
  const double s = (x - 0.5 * span) / centerline_radius();
  return std::asin(std::min(1.0, std::max(-1.0, s)));
}

double ArchGeometry::barrel_area() const {
  const double ri = intrados_radius(), ro = extrados_radius();
  return half_angle() * (ro * ro - ri * ri);
}

}  // namespace archcal
