#include "archcal/continuum.hpp"

#include <algorithm>
#include <cmath>

namespace archcal {

namespace {

constexpr double kTensionFloorRatio = 1.0e-3;   // floor on effective tensile strength
constexpr double kCompResidualRatio = 0.02;     // residual nominal compressive strength
constexpr double kDamagedTangentFloor = 1.0e-6; // stabilisation floor at d ~ 1

// Modified regula falsi (Illinois) on a bracketed root.
template <typename F>
double illinois(F&& f, double a, double fa, double b, double fb, double ftol, int maxit,
                bool& ok) {
  double best_x = std::abs(fa) < std::abs(fb) ? a : b;
  double best_f = std::min(std::abs(fa), std::abs(fb));
  for (int it = 0; it < maxit; ++it) {
    const double denom = fb - fa;
    double x = (std::abs(denom) > 0.0) ? b - fb * (b - a) / denom : 0.5 * (a + b);
    if (!(x > std::min(a, b) && x < std::max(a, b))) x = 0.5 * (a + b);
    const double fx = f(x);
    if (std::abs(fx) < best_f) {
      best_f = std::abs(fx);
      best_x = x;
    }
    if (std::abs(fx) <= ftol) {
      ok = true;
      return x;
    }
    if ((fx > 0.0) == (fb > 0.0)) {
      b = x;
      fb = fx;
      fa *= 0.5;  // Illinois scaling keeps both ends moving
    } else {
      a = b;
      fa = fb;
      b = x;
      fb = fx;
    }
  }
  ok = best_f <= ftol;
  return best_x;
}

}  // namespace

void ContinuumParams::validate() const {
  if (E <= 0.0) throw InputError("continuum: E must be positive");
  if (nu < 0.0 || nu >= 0.5) throw InputError("continuum: nu must lie in [0, 0.5)");
  if (f_t <= 0.0) throw InputError("continuum: f_t must be positive");
  if (f_c_max <= 0.0) throw InputError("continuum: f_c_max must be positive");
  if (fb0_ratio <= 1.0) throw InputError("continuum: biaxial ratio must exceed 1");
  if (fy_ratio <= 0.0 || fy_ratio > 1.0)
    throw InputError("continuum: compressive onset fraction must lie in (0, 1]");
  if (psi_deg < 0.0 || psi_deg >= 56.3)
    throw InputError("continuum: dilatancy angle must lie in [0, 56.3) degrees");
  if (ecc <= 0.0) throw InputError("continuum: flow eccentricity must be positive");
  if (Kc <= 0.5 || Kc > 1.0) throw InputError("continuum: Kc must lie in (0.5, 1]");
  if (G_t <= 0.0) throw InputError("continuum: G_t must be positive");
  if (mu_split < 0.0 || mu_split > 1.0)
    throw InputError("continuum: plastic split must lie in [0, 1]");
  if (kappa_c_fc <= 0.0) throw InputError("continuum: kappa_c_fc must be positive");
  if (rho_c <= 0.0 || rho_c > 1.0)
    throw InputError("continuum: damage onset fraction must lie in (0, 1]");
  if (w_c < 0.0 || w_c > 1.0 || w_t < 0.0 || w_t > 1.0)
    throw InputError("continuum: recovery weights must lie in [0, 1]");
  if (comp_energy_factor <= 0.0)
    throw InputError("continuum: compressive energy factor must be positive");
}

ContinuumLaw::ContinuumLaw(const ContinuumParams& p, double l_ch) : p_(p), l_ch_(l_ch) {
  p_.validate();
  if (l_ch <= 0.0) throw InputError("continuum: characteristic length must be positive");
  const double mu = std::clamp(p_.mu_split, 1.0e-3, 1.0);
  // Nominal tensile softening is exponential with reference strain set so the
  // band dissipates G_t; clamp against snap-back in strain space.
  const double raw = mu * p_.G_t / (p_.f_t * l_ch_);
  const double floor = 1.05 * mu * p_.f_t / p_.E;
  kappa_ref_ = std::max(raw, floor);
  kappa_ref_clamped_ = raw < floor;
  h_t_ = p_.E * (1.0 - mu) / mu;

  const double kfc = p_.kappa_c_fc;
  const double area_hard = kfc * (p_.f_c0() + (2.0 / 3.0) * (p_.f_c_max - p_.f_c0()));
  const double target = p_.comp_energy_factor * p_.G_t / l_ch_;
  const double area_soft = std::max(target - area_hard, 0.05 * p_.f_c_max * kfc);
  comp_soft_slope_ = p_.f_c_max * p_.f_c_max / (2.0 * area_soft);
  comp_dmg_onset_ = p_.rho_c * kfc;
  comp_eff_slope_ = 2.0 * (p_.f_c_max - p_.f_c0()) * (1.0 - p_.rho_c) / kfc;

  el_ = Elasticity{p_.E, p_.nu};
}

double ContinuumLaw::tension_nominal(double kappa_t) const {
  return p_.f_t * std::exp(-std::max(kappa_t, 0.0) / kappa_ref_);
}

double ContinuumLaw::tension_effective(double kappa_t) const {
  const double raw = tension_nominal(kappa_t) + h_t_ * std::max(kappa_t, 0.0);
  return std::max(raw, kTensionFloorRatio * p_.f_t);
}

double ContinuumLaw::compression_nominal(double kappa_c) const {
  const double k = std::max(kappa_c, 0.0);
  const double kfc = p_.kappa_c_fc;
  if (k <= kfc) {
    const double x = k / kfc;
    return p_.f_c0() + (p_.f_c_max - p_.f_c0()) * (2.0 * x - x * x);
  }
  const double soft = p_.f_c_max - comp_soft_slope_ * (k - kfc);
  return std::max(soft, kCompResidualRatio * p_.f_c_max);
}

double ContinuumLaw::compression_effective(double kappa_c) const {
  const double k = std::max(kappa_c, 0.0);
  if (k <= comp_dmg_onset_) return compression_nominal(k);
  return compression_nominal(comp_dmg_onset_) + comp_eff_slope_ * (k - comp_dmg_onset_);
}

double ContinuumLaw::damage_t(double kappa_t) const {
  const double eff = tension_effective(kappa_t);
  return std::clamp(1.0 - tension_nominal(kappa_t) / eff, 0.0, 1.0);
}

double ContinuumLaw::damage_c(double kappa_c) const {
  const double eff = compression_effective(kappa_c);
  return std::clamp(1.0 - compression_nominal(kappa_c) / eff, 0.0, 1.0);
}

double ContinuumLaw::combined_damage(double dt, double dc, double r) const {
  const double st = 1.0 - p_.w_t * r;
  const double sc = 1.0 - p_.w_c * (1.0 - r);
  return std::clamp(1.0 - (1.0 - st * dc) * (1.0 - sc * dt), 0.0, 1.0);
}

double ContinuumLaw::beta(double kappa_t, double kappa_c) const {
  const double a = p_.alpha();
  return compression_effective(kappa_c) / tension_effective(kappa_t) * (1.0 - a) -
         (1.0 + a);
}

double ContinuumLaw::yield_value(const Principal2& pr, double kappa_t,
                                 double kappa_c) const {
  const double a = p_.alpha();
  const double I1 = pr.p1 + pr.p2 + pr.pz;
  const double m = I1 / 3.0;
  const double s1 = pr.p1 - m, s2 = pr.p2 - m, s3 = pr.pz - m;
  const double rho = std::sqrt(1.5 * (s1 * s1 + s2 * s2 + s3 * s3));
  const double smax = pr.maxv();
  const double num = a * I1 + rho + beta(kappa_t, kappa_c) * macaulay(smax) -
                     p_.gamma_lode() * macaulay(-smax);
  return num / (1.0 - a) - compression_effective(kappa_c);
}

double ContinuumLaw::yield_value(const Tensor2& sig_eff, double kappa_t,
                                 double kappa_c) const {
  return yield_value(principal_values(sig_eff), kappa_t, kappa_c);
}

double ContinuumLaw::shear_strength_effective(double kappa_t, double kappa_c) const {
  const double denom = std::sqrt(3.0) + beta(kappa_t, kappa_c);
  if (denom <= 0.0) throw ModelError("continuum: degenerate shear strength denominator");
  return (1.0 - p_.alpha()) / denom * compression_effective(kappa_c);
}

double ContinuumLaw::shear_strength_nominal(double kappa_t, double kappa_c) const {
  const double d = combined_damage(damage_t(kappa_t), damage_c(kappa_c), 0.5);
  return (1.0 - d) * shear_strength_effective(kappa_t, kappa_c);
}

double ContinuumLaw::solve_rho(double rho_tr, double dl, double G3) const {
  if (rho_tr <= 0.0) return 0.0;
  const double a = p_.ecc * p_.f_t * p_.tan_psi();
  // rho * (1 + G3*dl / sqrt(a^2 + rho^2)) = rho_tr, monotone in rho.
  double lo = 0.0, hi = rho_tr, x = rho_tr;
  for (int it = 0; it < 80; ++it) {
    const double q = std::sqrt(a * a + x * x);
    const double g = x + G3 * dl * x / q - rho_tr;
    if (std::abs(g) <= 1.0e-14 * (rho_tr + 1.0)) return x;
    const double dg = 1.0 + G3 * dl * a * a / (q * q * q);
    if (g > 0.0) hi = x; else lo = x;
    double xn = x - g / dg;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    x = xn;
  }
  return x;
}

ContinuumLaw::ReturnPoint ContinuumLaw::integrate(const ContinuumState& st,
                                                  const Tensor2& eps) const {
  ReturnPoint out;
  const Tensor2 eps_e = eps - st.eps_p;
  const Tensor2 sig_tr = el_.stress(eps_e);
  const Principal2 pr_tr = principal_values(sig_tr);
  out.kappa_t = st.kappa_t;
  out.kappa_c = st.kappa_c;

  const double Ftr = yield_value(pr_tr, st.kappa_t, st.kappa_c);
  const double tol = 1.0e-10 * p_.f_c_max;
  if (Ftr <= tol) {
    out.sig_eff = sig_tr;
    out.r = stress_weight(pr_tr);
    out.plastic = false;
    return out;
  }

  const double m_tr = (pr_tr.p1 + pr_tr.p2 + pr_tr.pz) / 3.0;
  const double s1 = pr_tr.p1 - m_tr, s2 = pr_tr.p2 - m_tr, s3 = pr_tr.pz - m_tr;
  const double rho_tr = std::sqrt(1.5 * (s1 * s1 + s2 * s2 + s3 * s3));
  const double G3 = 3.0 * el_.shear_modulus();
  const double Kb = el_.bulk_modulus();
  const double tpsi = p_.tan_psi();
  const double a_pot = p_.ecc * p_.f_t * tpsi;

  struct Eval {
    double F;
    double sig1, sig2, sigz;
    double dep1, dep2, depz;
    double kt, kc, r;
  };
  auto eval = [&](double dl) {
    Eval ev;
    const double p_new = m_tr - Kb * tpsi * dl;
    const double rho = solve_rho(rho_tr, dl, G3);
    const double scale = rho_tr > 0.0 ? rho / rho_tr : 0.0;
    const double Q = std::sqrt(a_pot * a_pot + rho * rho);
    const double d1 = scale * s1, d2 = scale * s2, d3 = scale * s3;
    ev.sig1 = d1 + p_new;
    ev.sig2 = d2 + p_new;
    ev.sigz = d3 + p_new;
    ev.dep1 = dl * (1.5 * d1 / Q + tpsi / 3.0);
    ev.dep2 = dl * (1.5 * d2 / Q + tpsi / 3.0);
    ev.depz = dl * (1.5 * d3 / Q + tpsi / 3.0);
    Principal2 pr{std::max(ev.sig1, ev.sig2), std::min(ev.sig1, ev.sig2), ev.sigz, 0.0};
    ev.r = stress_weight(pr);
    const double dep_max = std::max(ev.dep1, std::max(ev.dep2, ev.depz));
    const double dep_min = std::min(ev.dep1, std::min(ev.dep2, ev.depz));
    ev.kt = st.kappa_t + ev.r * macaulay(dep_max);
    ev.kc = st.kappa_c + (1.0 - ev.r) * macaulay(-dep_min);
    ev.F = yield_value(pr, ev.kt, ev.kc);
    return ev;
  };

  // Bracket the multiplier, then polish with a safeguarded secant.
  double dl_lo = 0.0, F_lo = Ftr;
  double dl_hi = Ftr / (G3 + Kb * tpsi * tpsi + p_.E);
  Eval ev_hi = eval(dl_hi);
  int guard = 0;
  while (ev_hi.F > 0.0) {
    dl_lo = dl_hi;
    F_lo = ev_hi.F;
    dl_hi *= 4.0;
    ev_hi = eval(dl_hi);
    if (++guard > 60) throw PointUpdateError("continuum return: no bracket for multiplier");
  }
  bool ok = false;
  const double ftol = 1.0e-10 * p_.f_c_max;
  const double dl = illinois([&](double x) { return eval(x).F; }, dl_lo, F_lo, dl_hi,
                             ev_hi.F, ftol, 50, ok);
  if (!ok) throw PointUpdateError("continuum return: multiplier solve stalled");
  const Eval ev = eval(dl);

  out.sig_eff = from_principal(ev.sig1, ev.sig2, ev.sigz, pr_tr.angle);
  out.dep = from_principal(ev.dep1, ev.dep2, ev.depz, pr_tr.angle);
  out.kappa_t = ev.kt;
  out.kappa_c = ev.kc;
  out.r = ev.r;
  out.plastic = true;
  return out;
}

Eigen::Matrix3d ContinuumLaw::elastic_tangent(double d) const {
  const double lam = p_.E * p_.nu / ((1.0 + p_.nu) * (1.0 - 2.0 * p_.nu));
  const double g = el_.shear_modulus();
  Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
  C(0, 0) = C(1, 1) = lam + 2.0 * g;
  C(0, 1) = C(1, 0) = lam;
  C(2, 2) = g;
  return (1.0 - d) * C;
}

ContinuumResult ContinuumLaw::update(ContinuumState& st, const Tensor2& eps,
                                     bool want_tangent) const {
  const ContinuumState in = st;

  auto nominal_of = [&](const Tensor2& e, bool* plastic_flag) {
    const ReturnPoint rp = integrate(in, e);
    const double dt = damage_t(rp.kappa_t);
    const double dc = damage_c(rp.kappa_c);
    const double d = combined_damage(dt, dc, rp.r);
    if (plastic_flag) *plastic_flag = rp.plastic;
    return rp.sig_eff * (1.0 - d);
  };

  const ReturnPoint rp = integrate(in, eps);
  const double dt = std::max(in.d_t, damage_t(rp.kappa_t));
  const double dc = std::max(in.d_c, damage_c(rp.kappa_c));
  const double d = combined_damage(dt, dc, rp.r);

  ContinuumResult res;
  res.stress_eff = rp.sig_eff;
  res.stress = rp.sig_eff * (1.0 - d);
  res.d = d;
  res.plastic = rp.plastic;

  // Commit the new state and its dissipation ledger.
  st.eps_p = in.eps_p + rp.dep;
  st.kappa_t = rp.kappa_t;
  st.kappa_c = rp.kappa_c;
  st.d_t = dt;
  st.d_c = dc;
  st.d = d;
  st.diss_plastic = in.diss_plastic + res.stress.dot(rp.dep);
  const Tensor2 eps_e = eps - st.eps_p;
  st.diss_damage = in.diss_damage + (d - in.d) * 0.5 * rp.sig_eff.dot(eps_e);

  if (want_tangent) {
    const bool damage_frozen =
        (in.d_t == 0.0 && in.d_c == 0.0) || (p_.w_t == 0.0 && p_.w_c == 0.0);
    if (!rp.plastic && damage_frozen) {
      res.tangent = elastic_tangent(d);
      res.tangent_fd = false;
    } else {
      const double h = 1.0e-7;
      Eigen::Matrix3d C;
      for (int j = 0; j < 3; ++j) {
        Tensor2 ep = eps, em = eps;
        if (j == 0) { ep.xx += h; em.xx -= h; }
        if (j == 1) { ep.yy += h; em.yy -= h; }
        if (j == 2) { ep.xy += 0.5 * h; em.xy -= 0.5 * h; }  // engineering gamma
        const Tensor2 sp = nominal_of(ep, nullptr);
        const Tensor2 sm = nominal_of(em, nullptr);
        C(0, j) = (sp.xx - sm.xx) / (2.0 * h);
        C(1, j) = (sp.yy - sm.yy) / (2.0 * h);
        C(2, j) = (sp.xy - sm.xy) / (2.0 * h);
      }
      res.tangent = C;
      res.tangent_fd = true;
    }
    if (d >= 0.99) res.tangent += kDamagedTangentFloor * p_.E * Eigen::Matrix3d::Identity();
  }
  return res;
}

}  // namespace archcal
