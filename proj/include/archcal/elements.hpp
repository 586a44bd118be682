#pragma once
// Element-level kernels: strain-displacement operators, consistent body
// loads and the kinematics of the quadratic line interfaces.  Plane strain
// throughout; displacement ordering per element is (ux0, uy0, ux1, uy1, ...).

#include <Eigen/Dense>
#include <array>

#include "archcal/geometry.hpp"

namespace archcal {

// Rows of B are (exx, eyy, engineering gamma_xy).
struct BOp8 {
  Eigen::Matrix<double, 3, 16> B;
  double detJ = 0.0;
};
struct BOp6 {
  Eigen::Matrix<double, 3, 12> B;
  double detJ = 0.0;
};

BOp8 quad8_boperator(const std::array<Vec2, 8>& xy, double xi, double eta);
BOp6 tri6_boperator(const std::array<Vec2, 6>& xy, double xi, double eta);

// Consistent nodal forces for self weight acting in -y.  `unit_weight` is in
// N/mm^3; the result is force per unit out-of-plane width.
Eigen::Matrix<double, 16, 1> quad8_gravity(const std::array<Vec2, 8>& xy,
                                           double unit_weight);
Eigen::Matrix<double, 12, 1> tri6_gravity(const std::array<Vec2, 6>& xy,
                                          double unit_weight);

// One sampling station of a 4-node line interface.  Stations sit at the two
// corner node pairs (trapezoid rule) so each pair's relative displacement
// involves only its own two nodes; nodal integration avoids the traction
// oscillations a midside-coupled scheme develops in stiff cohesive layers.
struct InterfaceStation {
  Vec2 normal;   // unit, bottom side towards top side
  Vec2 tangent;  // unit, normal rotated -90 degrees
  double weight = 0.0;  // quadrature weight times arc-length Jacobian
};

// Stations for the two corner pairs given the corner coordinates `a`, `b`.
// `ref_normal` fixes the sign of the computed normals.
std::array<InterfaceStation, 2> interface_stations(const Vec2& a, const Vec2& b,
                                                   const Vec2& ref_normal);

}  // namespace archcal
