#pragma once
// Small-strain tensor algebra for plane problems plus shared error types.
// Stress/strain tensors keep xx, yy, zz, xy; the out-of-plane shears are
// identically zero in every analysis this toolkit performs.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace archcal {

constexpr double kPi = 3.14159265358979323846;

inline double macaulay(double x) { return x > 0.0 ? x : 0.0; }
inline double deg2rad(double d) { return d * kPi / 180.0; }

struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& m) : std::runtime_error(m) {}
};
// Raised when a material-point solve cannot be completed for the given
// strain increment; the quasi-static loop reacts by cutting the step.
struct PointUpdateError : ModelError {
  explicit PointUpdateError(const std::string& m) : ModelError(m) {}
};
struct InputError : ModelError {
  explicit InputError(const std::string& m) : ModelError(m) {}
};

// Symmetric second-order tensor restricted to plane problems.
// Shear component is the tensor component (engineering gamma_xy = 2*xy).
struct Tensor2 {
  double xx = 0.0, yy = 0.0, zz = 0.0, xy = 0.0;

  double trace() const { return xx + yy + zz; }
  Tensor2 dev() const {
    const double m = trace() / 3.0;
    return {xx - m, yy - m, zz - m, xy};
  }
  double norm2() const { return xx * xx + yy * yy + zz * zz + 2.0 * xy * xy; }
  double J2() const {
    const Tensor2 s = dev();
    return 0.5 * s.norm2();
  }
  double dot(const Tensor2& o) const {
    return xx * o.xx + yy * o.yy + zz * o.zz + 2.0 * xy * o.xy;
  }

  Tensor2 operator+(const Tensor2& o) const { return {xx + o.xx, yy + o.yy, zz + o.zz, xy + o.xy}; }
  Tensor2 operator-(const Tensor2& o) const { return {xx - o.xx, yy - o.yy, zz - o.zz, xy - o.xy}; }
  Tensor2 operator*(double a) const { return {xx * a, yy * a, zz * a, xy * a}; }
  Tensor2& operator+=(const Tensor2& o) {
    xx += o.xx; yy += o.yy; zz += o.zz; xy += o.xy;
    return *this;
  }
};

// Principal values of a plane-constrained tensor: the two in-plane
// eigenvalues and zz.  `angle` rotates the x axis onto the first in-plane
// principal direction.
struct Principal2 {
  double p1 = 0.0, p2 = 0.0, pz = 0.0;  // p1 >= p2 in plane
  double angle = 0.0;

  double maxv() const { return std::max(p1, std::max(p2, pz)); }
  double minv() const { return std::min(p1, std::min(p2, pz)); }
};

inline Principal2 principal_values(const Tensor2& t) {
  Principal2 out;
  const double m = 0.5 * (t.xx + t.yy);
  const double r = std::hypot(0.5 * (t.xx - t.yy), t.xy);
  out.p1 = m + r;
  out.p2 = m - r;
  out.pz = t.zz;
  out.angle = 0.5 * std::atan2(2.0 * t.xy, t.xx - t.yy);
  return out;
}

// Rebuild a tensor from in-plane principal values at `angle` plus zz.
inline Tensor2 from_principal(double p1, double p2, double pz, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Tensor2 t;
  t.xx = p1 * c * c + p2 * s * s;
  t.yy = p1 * s * s + p2 * c * c;
  t.xy = (p1 - p2) * s * c;
  t.zz = pz;
  return t;
}

// Triaxiality weight of Lubliner type: sum<pi>/sum|pi|, zero at zero stress.
inline double stress_weight(const Principal2& p) {
  const double num = macaulay(p.p1) + macaulay(p.p2) + macaulay(p.pz);
  const double den = std::abs(p.p1) + std::abs(p.p2) + std::abs(p.pz);
  if (den <= 0.0) return 0.0;
  return num / den;
}

// Isotropic elasticity acting on plane-constrained tensors.
struct Elasticity {
  double E = 0.0, nu = 0.0;

  double shear_modulus() const { return E / (2.0 * (1.0 + nu)); }
  double bulk_modulus() const { return E / (3.0 * (1.0 - 2.0 * nu)); }
  Tensor2 stress(const Tensor2& eps) const {
    const double lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const double g = shear_modulus();
    const double tr = eps.trace();
    return {lam * tr + 2.0 * g * eps.xx, lam * tr + 2.0 * g * eps.yy,
            lam * tr + 2.0 * g * eps.zz, 2.0 * g * eps.xy};
  }
};

}  // namespace archcal
