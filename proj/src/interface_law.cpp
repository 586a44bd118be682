#include "archcal/interface_law.hpp"

#include <algorithm>
#include <cmath>

namespace archcal {

namespace {
inline double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }
}

void InterfaceParams::validate() const {
  if (k_n <= 0.0 || k_t <= 0.0)
    throw InputError("interface: elastic stiffnesses must be positive");
  if (f_t <= 0.0) throw InputError("interface: tensile strength must be positive");
  if (f_c <= 0.0) throw InputError("interface: compression cap must be positive");
  if (c <= 0.0) throw InputError("interface: cohesion must be positive");
  if (tanphi <= 0.0) throw InputError("interface: friction coefficient must be positive");
  if (tanphi_g < 0.0 || tanphi_g > tanphi)
    throw InputError("interface: dilatancy must lie in [0, tanphi]");
  if (G_t <= 0.0 || G_s <= 0.0 || G_c <= 0.0)
    throw InputError("interface: fracture energies must be positive");
  if (q_lim() < 0.0)
    throw InputError("interface: c/tanphi must not be smaller than f_t (q_lim >= 0)");
  if (mode1_budget <= 1.0) throw InputError("interface: mode-I budget must exceed 1");
  if (hardening_modulus() >= 0.9 * k_n)
    throw InputError("interface: tensile hardening modulus too close to k_n");
}

SurfaceValues surface_values(const InterfaceParams& p, double sigma, double tau,
                             double q) {
  SurfaceValues f;
  f.F_s = std::abs(tau) + sigma * p.tanphi - p.cohesion(q);
  f.F_t = sigma - (p.f_t - q);
  f.F_c = -sigma - p.f_c;
  return f;
}

InterfaceLaw::InterfaceLaw(const InterfaceParams& p) : p_(p) { p_.validate(); }

namespace {
// Clamped tensile capacity: once q exhausts f_t the cut-off rests at zero.
inline double capacity(const InterfaceParams& p, double q) {
  return std::max(p.f_t - q, 0.0);
}
}

bool InterfaceLaw::admissible(const Plastic& pl, const InterfaceState& st) const {
  (void)st;
  const double tolf = 1.0e-9 * (p_.f_c + p_.c + p_.f_t);
  const double toll = -1.0e-11;
  if (!pl.valid) return false;
  if (pl.lam_t < toll || pl.lam_s < toll || pl.lam_c < toll) return false;
  const double at = std::abs(pl.st);
  if (at + pl.sn * p_.tanphi - p_.cohesion(pl.q_new) > tolf) return false;
  if (pl.sn - capacity(p_, pl.q_new) > tolf) return false;
  if (-pl.sn - p_.f_c > tolf) return false;
  return true;
}

InterfaceLaw::Plastic InterfaceLaw::try_tension(double sn_tr, double st_tr,
                                                const InterfaceState& st) const {
  Plastic pl;
  pl.st = st_tr;
  const double H = p_.hardening_modulus();
  const double cap_old = capacity(p_, st.q);
  if (st.q >= p_.f_t) {
    pl.lam_t = sn_tr / p_.k_n;
    pl.q_new = st.q;
    pl.sn = 0.0;
    pl.W_eff_t = 0.0;
  } else {
    const double lam_uns = (sn_tr - cap_old) / (p_.k_n - H);
    if (st.q + H * lam_uns <= p_.f_t) {
      pl.lam_t = lam_uns;
      pl.q_new = st.q + H * lam_uns;
      pl.sn = capacity(p_, pl.q_new);
      pl.W_eff_t = 0.5 * pl.lam_t * (cap_old + pl.sn);
    } else {
      pl.lam_t = sn_tr / p_.k_n;
      pl.q_new = p_.f_t;
      pl.sn = 0.0;
      pl.W_eff_t = cap_old * cap_old / (2.0 * H);
    }
  }
  pl.valid = pl.lam_t >= 0.0;
  return pl;
}

InterfaceLaw::Plastic InterfaceLaw::try_shear(double sn_tr, double st_tr,
                                              const InterfaceState& st) const {
  Plastic pl;
  pl.q_new = st.q;
  const double at = std::abs(st_tr);
  const double Fs = at + sn_tr * p_.tanphi - p_.cohesion(st.q);
  const double lam = Fs / (p_.k_t + p_.k_n * p_.tanphi * p_.tanphi_g);
  const double at_new = at - p_.k_t * lam;
  pl.lam_s = lam;
  pl.sn = sn_tr - p_.k_n * lam * p_.tanphi_g;
  pl.st = sgn(st_tr) * at_new;
  pl.valid = lam >= 0.0 && at_new >= -1.0e-12 * (p_.c + 1.0);
  return pl;
}

InterfaceLaw::Plastic InterfaceLaw::try_compression(double sn_tr, double st_tr,
                                                    const InterfaceState& st) const {
  Plastic pl;
  pl.q_new = st.q;
  pl.lam_c = (-sn_tr - p_.f_c) / p_.k_n;
  pl.sn = -p_.f_c;
  pl.st = st_tr;
  pl.valid = pl.lam_c >= 0.0;
  return pl;
}

InterfaceLaw::Plastic InterfaceLaw::try_tension_shear(double sn_tr, double st_tr,
                                                      const InterfaceState& st) const {
  Plastic pl;
  const double H = p_.hardening_modulus();
  const double cap_old = capacity(p_, st.q);
  const double at = std::abs(st_tr);

  auto lam_s_of = [&](double q_new, double sn) {
    return (at - (p_.cohesion(q_new) - sn * p_.tanphi)) / p_.k_t;
  };
  auto residual = [&](double lam_t) {
    const double q_new = std::min(st.q + H * lam_t, p_.f_t);
    const double sn = capacity(p_, q_new);
    const double ls = lam_s_of(q_new, sn);
    return sn_tr - p_.k_n * (lam_t + ls * p_.tanphi_g) - sn;
  };

  double lo = 0.0, hi = std::max((sn_tr + p_.f_c) / p_.k_n, 1.0e-12);
  double flo = residual(lo);
  if (flo < 0.0) {  // corner not engaged from this side
    pl.valid = false;
    return pl;
  }
  double fhi = residual(hi);
  int guard = 0;
  while (fhi > 0.0 && guard++ < 60) {
    hi *= 2.0;
    fhi = residual(hi);
  }
  if (fhi > 0.0) {
    pl.valid = false;
    return pl;
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) > 0.0) lo = mid; else hi = mid;
  }
  const double lam_t = 0.5 * (lo + hi);
  const double q_new = std::min(st.q + H * lam_t, p_.f_t);
  pl.lam_t = lam_t;
  pl.q_new = q_new;
  pl.sn = capacity(p_, q_new);
  pl.lam_s = lam_s_of(q_new, pl.sn);
  pl.st = sgn(st_tr) * (at - p_.k_t * pl.lam_s);
  if (q_new < p_.f_t)
    pl.W_eff_t = 0.5 * lam_t * (cap_old + pl.sn);
  else
    pl.W_eff_t = cap_old * cap_old / (2.0 * H);
  pl.valid = pl.lam_t >= -1.0e-14 && pl.lam_s >= -1.0e-14 && std::abs(pl.st) >= -1.0e-12;
  return pl;
}

InterfaceLaw::Plastic InterfaceLaw::try_shear_compression(double sn_tr, double st_tr,
                                                          const InterfaceState& st) const {
  Plastic pl;
  pl.q_new = st.q;
  const double at = std::abs(st_tr);
  const double at_new = p_.cohesion(st.q) + p_.f_c * p_.tanphi;
  pl.lam_s = (at - at_new) / p_.k_t;
  pl.sn = -p_.f_c;
  pl.st = sgn(st_tr) * at_new;
  pl.lam_c = (-p_.f_c - sn_tr + p_.k_n * pl.lam_s * p_.tanphi_g) / p_.k_n;
  pl.valid = pl.lam_s >= 0.0 && pl.lam_c >= 0.0;
  return pl;
}

void InterfaceLaw::nominal(double sn_eff, double st_eff, double Dn, double Dt,
                           double& sn, double& stt) const {
  sn = (1.0 - Dn) * macaulay(sn_eff) - macaulay(-sn_eff);
  const double fric_cap = p_.tanphi * macaulay(-sn_eff);
  const double at = std::abs(st_eff);
  stt = sgn(st_eff) * ((1.0 - Dt) * at + Dt * std::min(at, fric_cap));
}

InterfaceResult InterfaceLaw::update(InterfaceState& st, double dn, double dt,
                                     bool want_tangent,
                                     bool frozen_tangent) const {
  const InterfaceState in = st;

  // Pure map from a frozen input state; used for the centre point and for
  // tangent perturbations.
  struct Probe {
    double sn_eff, st_eff;
    Plastic pl;
    bool plastic;
  };
  auto integrate = [&](double jn, double jt) -> Probe {
    Probe pr{};
    const double sn_tr = p_.k_n * (jn - in.dp_n);
    const double st_tr = p_.k_t * (jt - in.dp_t);
    const double tolf = 1.0e-10 * (p_.f_c + p_.c + p_.f_t);
    const double Fs = std::abs(st_tr) + sn_tr * p_.tanphi - p_.cohesion(in.q);
    const double Ft = sn_tr - capacity(p_, in.q);
    const double Fc = -sn_tr - p_.f_c;
    if (Fs <= tolf && Ft <= tolf && Fc <= tolf) {
      pr.sn_eff = sn_tr;
      pr.st_eff = st_tr;
      pr.plastic = false;
      return pr;
    }
    Plastic cands[5];
    int n = 0;
    if (Ft > tolf) cands[n++] = try_tension(sn_tr, st_tr, in);
    if (Fs > tolf) cands[n++] = try_shear(sn_tr, st_tr, in);
    if (Fc > tolf) cands[n++] = try_compression(sn_tr, st_tr, in);
    cands[n++] = try_tension_shear(sn_tr, st_tr, in);
    cands[n++] = try_shear_compression(sn_tr, st_tr, in);
    int attempts = 0;
    for (int i = 0; i < n; ++i) {
      if (++attempts > 8)
        throw PointUpdateError("interface return: active-set cycling limit reached");
      if (admissible(cands[i], in)) {
        pr.pl = cands[i];
        pr.sn_eff = cands[i].sn;
        pr.st_eff = cands[i].st;
        pr.plastic = true;
        return pr;
      }
    }
    throw PointUpdateError("interface return: no admissible active set");
  };

  const Probe ctr = integrate(dn, dt);
  InterfaceResult res;
  res.t_n_eff = ctr.sn_eff;
  res.t_t_eff = ctr.st_eff;
  res.plastic = ctr.plastic;

  double Dn = in.D_n, Dt = in.D_t;
  if (ctr.plastic) {
    const Plastic& pl = ctr.pl;
    st.dp_n = in.dp_n + pl.lam_t + pl.lam_s * p_.tanphi_g - pl.lam_c;
    st.dp_t = in.dp_t + sgn(p_.k_t * (dt - in.dp_t)) * pl.lam_s;
    st.q = pl.q_new;
    // Plastic work per mode; damage-driving parts use the nominal (damaged)
    // traction level so each mode dissipates its fracture energy in total.
    const double slice =
        std::max(std::abs(pl.st) - p_.tanphi * macaulay(-pl.sn), 0.0);
    st.W_pt = in.W_pt + (1.0 - in.D_n) * pl.W_eff_t;
    st.W_ps = in.W_ps + (1.0 - in.D_t) * slice * pl.lam_s;
    st.W_pc = in.W_pc + p_.f_c * pl.lam_c;
    st.W_fric = in.W_fric + p_.tanphi * macaulay(-pl.sn) * pl.lam_s +
                pl.sn * pl.lam_s * p_.tanphi_g;
    const double rt = std::min(st.W_pt / p_.G_t, 1.0);
    const double rs = std::min(st.W_ps / p_.G_s, 1.0);
    Dn = std::max(in.D_n, rt);
    Dt = std::max(in.D_t, std::max(rs, rt));
    st.D_n = Dn;
    st.D_t = Dt;
  }
  nominal(ctr.sn_eff, ctr.st_eff, Dn, Dt, res.t_n, res.t_t);

  if (want_tangent) {
    if (!ctr.plastic) {
      // Analytic secant of the damaged elastic branch.
      Eigen::Matrix2d T = Eigen::Matrix2d::Zero();
      T(0, 0) = ctr.sn_eff >= 0.0 ? (1.0 - Dn) * p_.k_n : p_.k_n;
      const double fric_cap = p_.tanphi * macaulay(-ctr.sn_eff);
      const bool capped = std::abs(ctr.st_eff) > fric_cap;
      T(1, 1) = (1.0 - Dt) * p_.k_t + (capped ? 0.0 : Dt * p_.k_t);
      if (capped && ctr.sn_eff < 0.0)
        T(1, 0) = -Dt * sgn(ctr.st_eff) * p_.tanphi * p_.k_n;
      res.tangent = T;
    } else {
      // Central difference of the full nominal map with damage evolving in
      // the perturbed trials; the damage drift sets the softening slope of a
      // sliding or opening band, so freezing it would overstate stiffness.
      auto probe_traction = [&](const Probe& pr, double& tn, double& tt) {
        if (frozen_tangent) {
          nominal(pr.sn_eff, pr.st_eff, Dn, Dt, tn, tt);
          return;
        }
        double Dnp = in.D_n, Dtp = in.D_t;
        if (pr.plastic) {
          const double slice = std::max(
              std::abs(pr.pl.st) - p_.tanphi * macaulay(-pr.pl.sn), 0.0);
          const double Wpt = in.W_pt + (1.0 - in.D_n) * pr.pl.W_eff_t;
          const double Wps = in.W_ps + (1.0 - in.D_t) * slice * pr.pl.lam_s;
          const double rt = std::min(Wpt / p_.G_t, 1.0);
          const double rs = std::min(Wps / p_.G_s, 1.0);
          Dnp = std::max(in.D_n, rt);
          Dtp = std::max(in.D_t, std::max(rs, rt));
        }
        nominal(pr.sn_eff, pr.st_eff, Dnp, Dtp, tn, tt);
      };
      const double h = 1.0e-7;
      Eigen::Matrix2d T;
      for (int j = 0; j < 2; ++j) {
        const double hn = j == 0 ? h : 0.0, ht = j == 1 ? h : 0.0;
        double snp, stp, snm, stm;
        probe_traction(integrate(dn + hn, dt + ht), snp, stp);
        probe_traction(integrate(dn - hn, dt - ht), snm, stm);
        T(0, j) = (snp - snm) / (2.0 * h);
        T(1, j) = (stp - stm) / (2.0 * h);
      }
      res.tangent = T;
    }
  }
  return res;
}

}  // namespace archcal
