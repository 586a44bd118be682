#pragma once
// Shape functions and quadrature rules for the element library.  Kept free of
// any material or mesh dependency so both the generators and the assembly
// kernels can use them.

#include <array>
#include <cmath>

namespace archcal {

struct GaussPoint2 {
  double xi, eta, w;
};

// 3x3 rule for 8-node quadrilaterals.
inline const std::array<GaussPoint2, 9>& quad_gauss9() {
  static const std::array<GaussPoint2, 9> pts = [] {
    const double a = std::sqrt(0.6);
    const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double x[3] = {-a, 0.0, a};
    std::array<GaussPoint2, 9> p{};
    int k = 0;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) p[k++] = {x[i], x[j], w[i] * w[j]};
    return p;
  }();
  return pts;
}

// Three interior points for 6-node triangles (degree-2 exact).
inline const std::array<GaussPoint2, 3>& tri_gauss3() {
  static const std::array<GaussPoint2, 3> pts = {{
      {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0},
      {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
  }};
  return pts;
}

// Serendipity quadrilateral: corners 0..3 anticlockwise, midsides 4..7 with
// node 4 between corners 0 and 1.
inline void quad8_shape(double xi, double eta, std::array<double, 8>& N,
                        std::array<double, 8>& dNdxi,
                        std::array<double, 8>& dNdeta) {
  const double xs[8] = {-1, 1, 1, -1, 0, 1, 0, -1};
  const double es[8] = {-1, -1, 1, 1, -1, 0, 1, 0};
  for (int i = 0; i < 4; ++i) {
    const double x0 = xs[i], e0 = es[i];
    N[i] = 0.25 * (1 + x0 * xi) * (1 + e0 * eta) * (x0 * xi + e0 * eta - 1);
    dNdxi[i] = 0.25 * x0 * (1 + e0 * eta) * (2 * x0 * xi + e0 * eta);
    dNdeta[i] = 0.25 * e0 * (1 + x0 * xi) * (x0 * xi + 2 * e0 * eta);
  }
  for (int i = 4; i < 8; ++i) {
    if (es[i] == 0) {  // vertical midsides (5, 7)
      const double x0 = xs[i];
      N[i] = 0.5 * (1 + x0 * xi) * (1 - eta * eta);
      dNdxi[i] = 0.5 * x0 * (1 - eta * eta);
      dNdeta[i] = -(1 + x0 * xi) * eta;
    } else {  // horizontal midsides (4, 6)
      const double e0 = es[i];
      N[i] = 0.5 * (1 - xi * xi) * (1 + e0 * eta);
      dNdxi[i] = -xi * (1 + e0 * eta);
      dNdeta[i] = 0.5 * (1 - xi * xi) * e0;
    }
  }
}

// Quadratic triangle: corners 0..2, midsides 3 (0-1), 4 (1-2), 5 (2-0).
// Area coordinates L1 = xi, L2 = eta, L0 = 1 - xi - eta.
inline void tri6_shape(double xi, double eta, std::array<double, 6>& N,
                       std::array<double, 6>& dNdxi,
                       std::array<double, 6>& dNdeta) {
  const double L0 = 1.0 - xi - eta, L1 = xi, L2 = eta;
  N[0] = L0 * (2 * L0 - 1);
  N[1] = L1 * (2 * L1 - 1);
  N[2] = L2 * (2 * L2 - 1);
  N[3] = 4 * L0 * L1;
  N[4] = 4 * L1 * L2;
  N[5] = 4 * L2 * L0;
  dNdxi[0] = 1 - 4 * L0;
  dNdxi[1] = 4 * L1 - 1;
  dNdxi[2] = 0;
  dNdxi[3] = 4 * (L0 - L1);
  dNdxi[4] = 4 * L2;
  dNdxi[5] = -4 * L2;
  dNdeta[0] = 1 - 4 * L0;
  dNdeta[1] = 0;
  dNdeta[2] = 4 * L2 - 1;
  dNdeta[3] = -4 * L1;
  dNdeta[4] = 4 * L1;
  dNdeta[5] = 4 * (L0 - L2);
}

// Quadratic line: nodes at s = -1, 0, +1.
inline void line3_shape(double s, std::array<double, 3>& N,
                        std::array<double, 3>& dNds) {
  N[0] = 0.5 * s * (s - 1);
  N[1] = 1 - s * s;
  N[2] = 0.5 * s * (s + 1);
  dNds[0] = s - 0.5;
  dNds[1] = -2 * s;
  dNds[2] = s + 0.5;
}

}  // namespace archcal
