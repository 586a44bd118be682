#include "archcal/elements.hpp"

#include <cmath>

#include "archcal/core.hpp"
#include "archcal/shapes.hpp"

namespace archcal {

namespace {

// Maps parent-space gradients to world space; returns detJ.
template <int N>
double world_gradients(const std::array<Vec2, N>& xy,
                       const std::array<double, N>& dNdxi,
                       const std::array<double, N>& dNdeta,
                       std::array<double, N>& dNdx,
                       std::array<double, N>& dNdy) {
  double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
  for (int a = 0; a < N; ++a) {
    j11 += dNdxi[a] * xy[a].x;
    j12 += dNdxi[a] * xy[a].y;
    j21 += dNdeta[a] * xy[a].x;
    j22 += dNdeta[a] * xy[a].y;
  }
  const double det = j11 * j22 - j12 * j21;
  if (!(det > 0.0)) throw ModelError("element Jacobian not positive");
  const double i11 = j22 / det, i12 = -j12 / det;
  const double i21 = -j21 / det, i22 = j11 / det;
  for (int a = 0; a < N; ++a) {
    dNdx[a] = i11 * dNdxi[a] + i12 * dNdeta[a];
    dNdy[a] = i21 * dNdxi[a] + i22 * dNdeta[a];
  }
  return det;
}

template <int N, typename BT>
void fill_b(const std::array<double, N>& dNdx, const std::array<double, N>& dNdy,
            BT& B) {
  B.setZero();
  for (int a = 0; a < N; ++a) {
    B(0, 2 * a) = dNdx[a];
    B(1, 2 * a + 1) = dNdy[a];
    B(2, 2 * a) = dNdy[a];
    B(2, 2 * a + 1) = dNdx[a];
  }
}

}  // namespace

BOp8 quad8_boperator(const std::array<Vec2, 8>& xy, double xi, double eta) {
  std::array<double, 8> N, dXi, dEta, dx, dy;
  quad8_shape(xi, eta, N, dXi, dEta);
  BOp8 op;
  op.detJ = world_gradients<8>(xy, dXi, dEta, dx, dy);
  fill_b<8>(dx, dy, op.B);
  return op;
}

BOp6 tri6_boperator(const std::array<Vec2, 6>& xy, double xi, double eta) {
  std::array<double, 6> N, dXi, dEta, dx, dy;
  tri6_shape(xi, eta, N, dXi, dEta);
  BOp6 op;
  op.detJ = world_gradients<6>(xy, dXi, dEta, dx, dy);
  fill_b<6>(dx, dy, op.B);
  return op;
}

Eigen::Matrix<double, 16, 1> quad8_gravity(const std::array<Vec2, 8>& xy,
                                           double unit_weight) {
  Eigen::Matrix<double, 16, 1> f = Eigen::Matrix<double, 16, 1>::Zero();
  std::array<double, 8> N, dXi, dEta, dx, dy;
  for (const auto& gp : quad_gauss9()) {
    quad8_shape(gp.xi, gp.eta, N, dXi, dEta);
    const double det = world_gradients<8>(xy, dXi, dEta, dx, dy);
    for (int a = 0; a < 8; ++a)
      f(2 * a + 1) -= N[a] * unit_weight * det * gp.w;
  }
  return f;
}

Eigen::Matrix<double, 12, 1> tri6_gravity(const std::array<Vec2, 6>& xy,
                                          double unit_weight) {
  Eigen::Matrix<double, 12, 1> f = Eigen::Matrix<double, 12, 1>::Zero();
  std::array<double, 6> N, dXi, dEta, dx, dy;
  for (const auto& gp : tri_gauss3()) {
    tri6_shape(gp.xi, gp.eta, N, dXi, dEta);
    const double det = world_gradients<6>(xy, dXi, dEta, dx, dy);
    for (int a = 0; a < 6; ++a)
      f(2 * a + 1) -= N[a] * unit_weight * det * gp.w;
  }
  return f;
}

std::array<InterfaceStation, 2> interface_stations(const Vec2& a, const Vec2& b,
                                                   const Vec2& ref_normal) {
  Vec2 t{b.x - a.x, b.y - a.y};
  const double len = std::hypot(t.x, t.y);
  if (!(len > 0.0)) throw ModelError("degenerate interface chord");
  t.x /= len;
  t.y /= len;
  Vec2 n{t.y, -t.x};
  if (n.x * ref_normal.x + n.y * ref_normal.y < 0.0) {
    n.x = -n.x;
    n.y = -n.y;
    t.x = -t.x;
    t.y = -t.y;
  }
  const InterfaceStation s{n, t, 0.5 * len};
  return {s, s};
}

}  // namespace archcal
