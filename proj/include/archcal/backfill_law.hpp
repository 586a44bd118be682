#pragma once
// Granular backfill: linear elastic, perfectly plastic Drucker-Prager cone
// with non-associated flow.  Cone constants are matched to the Mohr-Coulomb
// friction/dilatancy coefficients under plane-strain conditions.

#include <Eigen/Core>

#include "archcal/core.hpp"

namespace archcal {

struct BackfillParams {
  double E = 0.0, nu = 0.0;
  double c_b = 0.0;       // cohesion, MPa
  double tanphi_b = 0.0;  // friction coefficient
  double tanpsi_b = 0.0;  // dilatancy coefficient

  static double eta_of(double t) { return 3.0 * t / std::sqrt(9.0 + 12.0 * t * t); }
  double eta() const { return eta_of(tanphi_b); }
  double xi() const { return 3.0 / std::sqrt(9.0 + 12.0 * tanphi_b * tanphi_b); }
  double eta_psi() const { return eta_of(tanpsi_b); }
  void validate() const;
};

struct BackfillState {
  Tensor2 eps_p;
  double diss = 0.0;
};

struct BackfillResult {
  Tensor2 stress;
  bool plastic = false;
  bool apex = false;
  Eigen::Matrix3d tangent = Eigen::Matrix3d::Zero();
};

class BackfillLaw {
 public:
  explicit BackfillLaw(const BackfillParams& p);

  const BackfillParams& params() const { return p_; }
  double yield_value(const Tensor2& sig) const {
    return std::sqrt(sig.J2()) + p_.eta() * sig.trace() / 3.0 - p_.xi() * p_.c_b;
  }
  BackfillResult update(BackfillState& st, const Tensor2& eps,
                        bool want_tangent = true) const;
  Eigen::Matrix3d elastic_tangent() const;

 private:
  Tensor2 integrate(const BackfillState& st, const Tensor2& eps, Tensor2* dep,
                    bool* plastic, bool* apex) const;
  BackfillParams p_;
  Elasticity el_;
};

}  // namespace archcal
