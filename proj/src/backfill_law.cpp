#include "archcal/backfill_law.hpp"

namespace archcal {

void BackfillParams::validate() const {
  if (E <= 0.0) throw InputError("backfill: E must be positive");
  if (nu < 0.0 || nu >= 0.5) throw InputError("backfill: nu must lie in [0, 0.5)");
  if (c_b <= 0.0) throw InputError("backfill: cohesion must be positive");
  if (tanphi_b <= 0.0) throw InputError("backfill: friction must be positive");
  if (tanpsi_b < 0.0 || tanpsi_b > tanphi_b)
    throw InputError("backfill: dilatancy must lie in [0, tanphi]");
}

BackfillLaw::BackfillLaw(const BackfillParams& p) : p_(p) {
  p_.validate();
  el_ = Elasticity{p_.E, p_.nu};
}

Tensor2 BackfillLaw::integrate(const BackfillState& st, const Tensor2& eps, Tensor2* dep,
                               bool* plastic, bool* apex) const {
  const Tensor2 sig_tr = el_.stress(eps - st.eps_p);
  const double F_tr = yield_value(sig_tr);
  if (plastic) *plastic = false;
  if (apex) *apex = false;
  if (dep) *dep = Tensor2{};
  if (F_tr <= 1.0e-12 * (p_.E * 1.0e-3 + p_.c_b)) return sig_tr;

  const double G = el_.shear_modulus();
  const double Kb = el_.bulk_modulus();
  const double eta = p_.eta(), eta_psi = p_.eta_psi(), xi = p_.xi();
  const double p_tr = sig_tr.trace() / 3.0;
  const Tensor2 s_tr = sig_tr.dev();
  const double sqJ2_tr = std::sqrt(sig_tr.J2());

  double lam = F_tr / (G + eta * eta_psi * Kb);
  double sqJ2_new = sqJ2_tr - G * lam;
  Tensor2 sig;
  Tensor2 delta_ep;
  if (sqJ2_new >= 0.0) {
    const double scale = sqJ2_tr > 0.0 ? sqJ2_new / sqJ2_tr : 0.0;
    const double p_new = p_tr - Kb * eta_psi * lam;
    sig = s_tr * scale;
    sig.xx += p_new;
    sig.yy += p_new;
    sig.zz += p_new;
    const double inv = sqJ2_new > 0.0 ? 0.5 / sqJ2_new : 0.0;
    delta_ep = sig.dev() * (lam * inv);
    const double volp = lam * eta_psi / 3.0;
    delta_ep.xx += volp;
    delta_ep.yy += volp;
    delta_ep.zz += volp;
  } else {
    // Cone tip: deviator vanishes, only a volumetric correction remains.
    if (apex) *apex = true;
    const double p_new = xi * p_.c_b / eta;
    sig = Tensor2{p_new, p_new, p_new, 0.0};
    delta_ep = eps - st.eps_p;  // elastic part of the final state
    const Tensor2 eps_e{p_new / (3.0 * Kb), p_new / (3.0 * Kb), p_new / (3.0 * Kb), 0.0};
    delta_ep = delta_ep - eps_e;
  }
  if (plastic) *plastic = true;
  if (dep) *dep = delta_ep;
  return sig;
}

Eigen::Matrix3d BackfillLaw::elastic_tangent() const {
  const double lam = p_.E * p_.nu / ((1.0 + p_.nu) * (1.0 - 2.0 * p_.nu));
  const double g = el_.shear_modulus();
  Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
  C(0, 0) = C(1, 1) = lam + 2.0 * g;
  C(0, 1) = C(1, 0) = lam;
  C(2, 2) = g;
  return C;
}

BackfillResult BackfillLaw::update(BackfillState& st, const Tensor2& eps,
                                   bool want_tangent) const {
  const BackfillState in = st;
  BackfillResult res;
  Tensor2 dep;
  res.stress = integrate(in, eps, &dep, &res.plastic, &res.apex);
  if (res.plastic) {
    st.eps_p = in.eps_p;
    st.eps_p += dep;
    st.diss = in.diss + res.stress.dot(dep);
  }
  if (want_tangent) {
    if (!res.plastic) {
      res.tangent = elastic_tangent();
    } else {
      const double h = 1.0e-7;
      for (int j = 0; j < 3; ++j) {
        Tensor2 ep = eps, em = eps;
        if (j == 0) { ep.xx += h; em.xx -= h; }
        if (j == 1) { ep.yy += h; em.yy -= h; }
        if (j == 2) { ep.xy += 0.5 * h; em.xy -= 0.5 * h; }
        const Tensor2 sp = integrate(in, ep, nullptr, nullptr, nullptr);
        const Tensor2 sm = integrate(in, em, nullptr, nullptr, nullptr);
        res.tangent(0, j) = (sp.xx - sm.xx) / (2.0 * h);
        res.tangent(1, j) = (sp.yy - sm.yy) / (2.0 * h);
        res.tangent(2, j) = (sp.xy - sm.xy) / (2.0 * h);
      }
    }
  }
  return res;
}

}  // namespace archcal
