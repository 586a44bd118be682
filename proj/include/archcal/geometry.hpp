#pragma once
// Circular-segment arch geometry.  The span/rise pair describes the ring
// centerline: a circle through both springing points (0,0), (span,0) and the
// crown (span/2, rise).  Angles are measured from the crown, negative towards
// the left springing.

#include <array>

#include "archcal/core.hpp"

namespace archcal {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

struct ArchGeometry {
  double span = 0.0;             // mm, centerline chord at springing level
  double rise = 0.0;             // mm, centerline rise above springing line
  double thickness = 0.0;        // mm, total radial thickness of the barrel
  double width = 0.0;            // mm, out-of-plane width (per-width scaling)
  int ring_count = 1;
  double brick_length = 0.0;     // mm, along the arc
  double brick_height = 0.0;     // mm, radial; adjusted so rings fill the barrel
  double joint_thickness = 0.0;  // mm, physical mortar joint (meshed at zero size)

  void validate() const;

  // Adjusted radial brick height so that ring_count bricks plus the
  // intermediate joints exactly fill the thickness.  The adjustment is what
  // the mesh generator applies when the nominal height disagrees.
  double adjusted_brick_height() const {
    return (thickness - (ring_count - 1) * joint_thickness) / ring_count;
  }

  double centerline_radius() const {
    return (0.25 * span * span + rise * rise) / (2.0 * rise);
  }
  double half_angle() const;  // radians from crown to a springing
  Vec2 center() const { return {0.5 * span, rise - centerline_radius()}; }

  double intrados_radius() const { return centerline_radius() - 0.5 * thickness; }
  double extrados_radius() const { return centerline_radius() + 0.5 * thickness; }

  // Radial extent of ring k (1-based, ring 1 at the intrados).  Joints are
  // collapsed to zero thickness, so rings tile the annulus exactly.
  double ring_inner_radius(int k) const {
    return intrados_radius() + (k - 1) * thickness / ring_count;
  }
  double ring_outer_radius(int k) const {
    return intrados_radius() + k * thickness / ring_count;
  }
  double ring_mid_radius(int k) const {
    return 0.5 * (ring_inner_radius(k) + ring_outer_radius(k));
  }

  // Point at radius r and crown-relative angle phi.
  Vec2 point(double r, double phi) const;
  // Angle of the centerline point above horizontal position x.
  double angle_at_x(double x) const;
  // Arc length of a full ring sweep at radius r.
  double arc_length(double r) const { return r * 2.0 * half_angle(); }
  // Radial joint pitch along an arc (brick plus one mortar joint).
  double joint_pitch() const { return brick_length + joint_thickness; }

  // Area of the annulus sector occupied by the barrel.
  double barrel_area() const;
};

}  // namespace archcal
