#pragma once
// Zero-thickness joint model: multi-surface plasticity on the effective
// tractions (Coulomb slip, tension cut-off, compression cap) with scalar
// damage driven by accumulated plastic work per mode.  Damage removes the
// tensile and cohesive transfer; compressive contact and residual friction
// are never damaged.

#include <Eigen/Core>

#include "archcal/core.hpp"

namespace archcal {

struct InterfaceParams {
  double k_n = 0.0, k_t = 0.0;   // elastic stiffness per area, N/mm^3
  double f_t = 0.0;              // tensile strength, MPa
  double f_c = 0.0;              // compression cap, MPa (entered positive)
  double c = 0.0;                // cohesion, MPa
  double tanphi = 0.0;           // friction coefficient
  double tanphi_g = 0.0;         // dilatancy coefficient (non-associated slip)
  double G_t = 0.0, G_s = 0.0, G_c = 0.0;  // fracture energies, N/mm
  // Effective-space mode-I work budget in units of G_t; sets the linear
  // hardening modulus of the tension cut-off.
  double mode1_budget = 6.0;

  double q_lim() const { return c / tanphi - f_t; }
  double hardening_modulus() const {
    return f_t * f_t / (2.0 * mode1_budget * G_t);
  }
  // Cohesion after the tensile surface has collapsed onto the friction cone.
  double cohesion(double q) const {
    return q <= q_lim() ? c : c + (q - q_lim()) * tanphi;
  }
  void validate() const;
};

// Literal surface evaluations (no clamping of the tensile cap).
struct SurfaceValues {
  double F_s = 0.0, F_t = 0.0, F_c = 0.0;
};
SurfaceValues surface_values(const InterfaceParams& p, double sigma, double tau, double q);

struct InterfaceState {
  double dp_n = 0.0, dp_t = 0.0;  // plastic jump components, mm
  double q = 0.0;                 // tensile hardening variable, MPa
  double W_pt = 0.0, W_ps = 0.0, W_pc = 0.0;  // plastic work per mode, N/mm
  double W_fric = 0.0;            // frictional (plus dilatant) work, unbounded
  double D_n = 0.0, D_t = 0.0;    // damage of tensile / cohesive transfer
};

struct InterfaceResult {
  double t_n = 0.0, t_t = 0.0;          // nominal tractions, MPa
  double t_n_eff = 0.0, t_t_eff = 0.0;  // effective tractions
  bool plastic = false;
  Eigen::Matrix2d tangent = Eigen::Matrix2d::Zero();  // d(t_n,t_t)/d(dn,dt)
};

class InterfaceLaw {
 public:
  explicit InterfaceLaw(const InterfaceParams& p);

  const InterfaceParams& params() const { return p_; }

  // Strain-driven update; jump = (normal opening, tangential slip) in mm.
  // The state is committed in place.  Elastic steps leave it bitwise intact.
  // `frozen_tangent` reports the stiffness with damage held at the values the
  // update itself just reached; the default lets damage evolve in the
  // perturbations, which captures the softening slope of an active band.
  InterfaceResult update(InterfaceState& st, double dn, double dt,
                         bool want_tangent = true,
                         bool frozen_tangent = false) const;

  // Damage ratios of the current state (diagnostics; r_c is tracked but does
  // not reduce the compressive contact).
  double ratio_t(const InterfaceState& st) const { return std::min(st.W_pt / p_.G_t, 1.0); }
  double ratio_s(const InterfaceState& st) const { return std::min(st.W_ps / p_.G_s, 1.0); }
  double ratio_c(const InterfaceState& st) const { return std::min(st.W_pc / p_.G_c, 1.0); }

  // Nominal tractions for a given effective pair and damage.
  void nominal(double sn_eff, double st_eff, double Dn, double Dt, double& sn,
               double& stt) const;

 private:
  struct Plastic {
    double sn, st;        // effective tractions after return
    double lam_t = 0.0, lam_s = 0.0, lam_c = 0.0;
    double q_new;
    double W_eff_t = 0.0;  // effective tensile work along the return path
    bool valid = false;
  };
  Plastic try_tension(double sn_tr, double st_tr, const InterfaceState& st) const;
  Plastic try_shear(double sn_tr, double st_tr, const InterfaceState& st) const;
  Plastic try_compression(double sn_tr, double st_tr, const InterfaceState& st) const;
  Plastic try_tension_shear(double sn_tr, double st_tr, const InterfaceState& st) const;
  Plastic try_shear_compression(double sn_tr, double st_tr, const InterfaceState& st) const;
  bool admissible(const Plastic& pl, const InterfaceState& st) const;

  InterfaceParams p_;
};

}  // namespace archcal
