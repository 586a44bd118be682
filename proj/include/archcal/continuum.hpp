#pragma once
// Isotropic damage-plasticity model for masonry treated as a continuum.
// Plasticity runs on the effective (undamaged) stress; the uniaxial strength
// laws harden in effective space while scalar damage produces the nominal
// softening.  Softening moduli are scaled by a characteristic length so that
// a localising band dissipates a prescribed fracture energy per unit area.

#include <Eigen/Core>

#include "archcal/core.hpp"

namespace archcal {

struct ContinuumParams {
  double E = 0.0, nu = 0.0;
  double f_t = 0.0;            // initial uniaxial tensile strength, MPa
  double f_c_max = 0.0;        // peak uniaxial compressive strength, MPa
  double fb0_ratio = 1.16;     // equibiaxial / uniaxial compressive ratio
  double fy_ratio = 0.3;       // compressive elastic limit as fraction of peak
  double psi_deg = 35.0;       // dilatancy angle, degrees
  double ecc = 0.1;            // flow potential eccentricity
  double Kc = 0.66;            // deviatoric cross-section shape factor
  double G_t = 0.0;            // mode-I fracture energy, N/mm
  double mu_split = 0.2;       // plastic share of the inelastic tensile strain
  double kappa_c_fc = 2.0e-3;  // compressive hardening strain at peak stress
  double rho_c = 1.0;          // compressive damage onset fraction of kappa_c_fc
  double w_c = 0.0, w_t = 0.0; // stiffness recovery weights
  double comp_energy_factor = 50.0;  // compressive band dissipation / G_t

  double alpha() const { return (fb0_ratio - 1.0) / (2.0 * fb0_ratio - 1.0); }
  double gamma_lode() const { return 3.0 * (1.0 - Kc) / (2.0 * Kc - 1.0); }
  double f_c0() const { return fy_ratio * f_c_max; }
  double tan_psi() const { return std::tan(deg2rad(psi_deg)); }
  void validate() const;
};

struct ContinuumState {
  Tensor2 eps_p;
  double kappa_t = 0.0, kappa_c = 0.0;
  double d_t = 0.0, d_c = 0.0;
  double d = 0.0;  // combined value at the last update (depends on stress state)
  double diss_plastic = 0.0, diss_damage = 0.0;  // per unit volume, N/mm^2
};

struct ContinuumResult {
  Tensor2 stress;      // nominal
  Tensor2 stress_eff;  // effective
  double d = 0.0;
  bool plastic = false;
  bool tangent_fd = false;  // true when the tangent came from perturbation
  Eigen::Matrix3d tangent = Eigen::Matrix3d::Zero();  // (sxx,syy,sxy)/(exx,eyy,gxy)
};

// Material law bound to a characteristic length (crack band size).
class ContinuumLaw {
 public:
  ContinuumLaw(const ContinuumParams& p, double l_ch);

  const ContinuumParams& params() const { return p_; }
  double char_length() const { return l_ch_; }
  double kappa_ref() const { return kappa_ref_; }
  bool snapback_clamped() const { return kappa_ref_clamped_; }

  // Uniaxial strength laws (all values positive).
  double tension_nominal(double kappa_t) const;
  double tension_effective(double kappa_t) const;
  double compression_nominal(double kappa_c) const;
  double compression_effective(double kappa_c) const;
  double damage_t(double kappa_t) const;
  double damage_c(double kappa_c) const;

  // Combined damage scalar with stiffness-recovery weights, r in [0,1].
  double combined_damage(double dt, double dc, double r) const;

  // Yield function on effective stress; the compressive strength enters with
  // a negative sign so F < 0 is elastic.
  double beta(double kappa_t, double kappa_c) const;
  double yield_value(const Tensor2& sig_eff, double kappa_t, double kappa_c) const;
  double yield_value(const Principal2& pr, double kappa_t, double kappa_c) const;

  // Initial and evolving strength of a pure-shear stress state.
  double shear_strength_effective(double kappa_t, double kappa_c) const;
  double shear_strength_nominal(double kappa_t, double kappa_c) const;

  // Strain-driven update with backward-Euler plastic return.
  ContinuumResult update(ContinuumState& state, const Tensor2& eps,
                         bool want_tangent = true) const;

  Eigen::Matrix3d elastic_tangent(double d) const;

 private:
  struct ReturnPoint {
    Tensor2 sig_eff;
    Tensor2 dep;
    double kappa_t, kappa_c;
    double r;
    bool plastic;
  };
  ReturnPoint integrate(const ContinuumState& state, const Tensor2& eps) const;
  double solve_rho(double rho_tr, double dl, double G3) const;

  ContinuumParams p_;
  double l_ch_;
  double kappa_ref_;
  bool kappa_ref_clamped_ = false;
  double h_t_;          // effective tensile hardening slope
  double comp_soft_slope_;
  double comp_dmg_onset_;
  double comp_eff_slope_;
  Elasticity el_;
};

}  // namespace archcal
