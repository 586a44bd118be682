#include "archcal/system.hpp"

#include <algorithm>
#include <cmath>

#include "archcal/shapes.hpp"

namespace archcal {

namespace {

Eigen::Matrix3d plane_strain_d(const Elasticity& el) {
  const double f = el.E / ((1.0 + el.nu) * (1.0 - 2.0 * el.nu));
  Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
  d(0, 0) = d(1, 1) = f * (1.0 - el.nu);
  d(0, 1) = d(1, 0) = f * el.nu;
  d(2, 2) = f * (1.0 - 2.0 * el.nu) / 2.0;
  return d;
}

double von_mises(const Tensor2& s) { return std::sqrt(3.0 * s.J2()); }

}  // namespace

FeModel::FeModel(Mesh mesh, const MaterialSet& mats)
    : mesh_(std::move(mesh)), mats_(mats) {
  const int nn = static_cast<int>(mesh_.nodes.size());
  brick_d_ = plane_strain_d(mats_.brick);
  grav_arch_ = Eigen::VectorXd::Zero(2 * nn);
  grav_fill_ = Eigen::VectorXd::Zero(2 * nn);

  const bool continuum = mats_.tier != Tier::kMeso;
  const auto& rule = quad_gauss9();
  quads_.resize(mesh_.quads.size());
  solid_pos_.resize(mesh_.quads.size() * 9);
  solid_wv_.resize(mesh_.quads.size() * 9);
  if (continuum) solid_laws_.reserve(mesh_.quads.size());
  for (size_t e = 0; e < mesh_.quads.size(); ++e) {
    QuadCache& qc = quads_[e];
    std::array<Vec2, 8> xy;
    for (int a = 0; a < 8; ++a) {
      const int nid = mesh_.quads[e][a];
      xy[a] = mesh_.nodes[nid];
      qc.dof[2 * a] = 2 * nid;
      qc.dof[2 * a + 1] = 2 * nid + 1;
    }
    double area = 0.0;
    std::array<double, 8> N, dXi, dEta;
    for (int g = 0; g < 9; ++g) {
      qc.op[g] = quad8_boperator(xy, rule[g].xi, rule[g].eta);
      const double wv = qc.op[g].detJ * rule[g].w;
      area += wv;
      quad8_shape(rule[g].xi, rule[g].eta, N, dXi, dEta);
      Vec2 p{0.0, 0.0};
      for (int a = 0; a < 8; ++a) {
        p.x += N[a] * xy[a].x;
        p.y += N[a] * xy[a].y;
      }
      solid_pos_[e * 9 + g] = p;
      solid_wv_[e * 9 + g] = wv;
    }
    qc.elastic = !continuum;
    if (qc.elastic) {
      qc.ke.setZero();
      for (int g = 0; g < 9; ++g)
        qc.ke += qc.op[g].B.transpose() * brick_d_ * qc.op[g].B *
                 solid_wv_[e * 9 + g];
    } else {
      solid_laws_.emplace_back(mats_.masonry, std::sqrt(area));
    }
    // 1 kN/m^3 = 1e-6 N/mm^3
    const auto fg = quad8_gravity(xy, 1e-6);
    for (int a = 0; a < 16; ++a) grav_arch_[qc.dof[a]] += fg(a);
  }

  const auto& trule = tri_gauss3();
  tris_.resize(mesh_.tris.size());
  tri_wv_.resize(mesh_.tris.size() * 3);
  for (size_t e = 0; e < mesh_.tris.size(); ++e) {
    TriCache& tc = tris_[e];
    std::array<Vec2, 6> xy;
    for (int a = 0; a < 6; ++a) {
      const int nid = mesh_.tris[e][a];
      xy[a] = mesh_.nodes[nid];
      tc.dof[2 * a] = 2 * nid;
      tc.dof[2 * a + 1] = 2 * nid + 1;
    }
    for (int g = 0; g < 3; ++g) {
      tc.op[g] = tri6_boperator(xy, trule[g].xi, trule[g].eta);
      tri_wv_[e * 3 + g] = tc.op[g].detJ * trule[g].w;
    }
    const auto fg = tri6_gravity(xy, 1e-6);
    for (int a = 0; a < 12; ++a) grav_fill_[tc.dof[a]] += fg(a);
  }
  if (!mesh_.tris.empty()) fill_law_.emplace(mats_.fill);

  joints_.resize(mesh_.interfaces.size());
  joint_pos_.resize(mesh_.interfaces.size() * 2);
  joint_wl_.resize(mesh_.interfaces.size() * 2);
  bool need_mortar = false, need_ring = false, need_bond = false;
  for (const auto& ie : mesh_.interfaces) {
    if (ie.role == JointRole::kExtradosBond)
      need_bond = true;
    else if (mats_.tier == Tier::kHybrid)
      need_ring = true;
    else
      need_mortar = true;
  }
  if (need_mortar) mortar_law_.emplace(mats_.mortar);
  if (need_ring) ring_law_.emplace(mats_.ring);
  if (need_bond) bond_law_.emplace(mats_.bond);
  for (size_t e = 0; e < mesh_.interfaces.size(); ++e) {
    const InterfaceElem& ie = mesh_.interfaces[e];
    JointCache& jc = joints_[e];
    // Corner pairs only; the midside node ids in the chain are geometry.
    const int corner[2] = {0, 2};
    for (int i = 0; i < 2; ++i) {
      const int c = corner[i];
      jc.dof[4 * i] = 2 * ie.n[c];
      jc.dof[4 * i + 1] = 2 * ie.n[c] + 1;
      jc.dof[4 * i + 2] = 2 * ie.n[c + 3];
      jc.dof[4 * i + 3] = 2 * ie.n[c + 3] + 1;
      joint_pos_[e * 2 + i] = mesh_.nodes[ie.n[c]];
    }
    jc.st = interface_stations(mesh_.nodes[ie.n[0]], mesh_.nodes[ie.n[2]],
                               Vec2{ie.nx, ie.ny});
    for (int i = 0; i < 2; ++i) joint_wl_[e * 2 + i] = jc.st[i].weight;
    jc.law = &law_for(ie.role);
  }

  eq_.assign(2 * nn, -2);
}

const InterfaceLaw& FeModel::law_for(JointRole role) const {
  const std::optional<InterfaceLaw>* slot = nullptr;
  if (role == JointRole::kExtradosBond)
    slot = &bond_law_;
  else if (mats_.tier == Tier::kHybrid)
    slot = &ring_law_;
  else
    slot = &mortar_law_;
  if (!slot->has_value()) throw ModelError("no interface law bound for joint role");
  return **slot;
}

void FeModel::fix_set(const std::string& node_set, bool fix_x, bool fix_y) {
  if (finalized()) throw ModelError("constraints frozen after finalize");
  auto it = mesh_.node_sets.find(node_set);
  if (it == mesh_.node_sets.end())
    throw InputError("unknown node set '" + node_set + "'");
  for (int nid : it->second) {
    if (fix_x) eq_[2 * nid] = -1;
    if (fix_y) eq_[2 * nid + 1] = -1;
  }
}

void FeModel::tie_patch(const std::string& patch) {
  if (finalized()) throw ModelError("constraints frozen after finalize");
  if (!mesh_.patches.count(patch))
    throw InputError("unknown patch '" + patch + "'");
  tied_.push_back(patch);
}

void FeModel::finalize() {
  if (finalized()) throw ModelError("finalize called twice");
  int next = 0;
  for (const auto& name : tied_) {
    const Patch& p = mesh_.patches.at(name);
    const int id = next++;
    for (const auto& edge : p.edges)
      for (int a = 0; a < 3; ++a) {
        int& slot = eq_[2 * edge[a] + 1];
        if (slot == -1)
          throw InputError("patch '" + name + "' overlaps a fixed support");
        if (slot >= 0 && slot != id)
          throw InputError("patch '" + name + "' overlaps another platen");
        slot = id;
      }
    platen_eq_[name] = id;
  }
  for (int d = 0; d < static_cast<int>(eq_.size()); ++d) {
    if (eq_[d] == -2) eq_[d] = next++;
    if (eq_[d] == -1) fixed_dofs_.push_back(d);
  }
  n_eq_ = next;
}

int FeModel::platen(const std::string& patch) const {
  auto it = platen_eq_.find(patch);
  if (it == platen_eq_.end())
    throw InputError("patch '" + patch + "' is not tied");
  return it->second;
}

GpStates FeModel::make_states() const {
  GpStates s;
  if (mats_.tier != Tier::kMeso) s.solid.resize(mesh_.quads.size() * 9);
  s.fill.resize(mesh_.tris.size() * 3);
  s.joint.resize(mesh_.interfaces.size() * 2);
  return s;
}

void FeModel::evaluate(const Eigen::VectorXd& u, const GpStates& base,
                       GpStates& trial, Eigen::VectorXd& f_int_full,
                       std::vector<Eigen::Triplet<double>>* k_triplets,
                       bool frozen_tangent) const {
  if (&trial == &base) throw ModelError("trial state aliases base state");
  trial = base;
  f_int_full.setZero(u.size());
  const bool want_k = k_triplets != nullptr;
  if (want_k) k_triplets->clear();

  auto scatter_k = [&](const int* dof, int nd, const Eigen::MatrixXd& ke) {
    for (int i = 0; i < nd; ++i) {
      const int ei = eq_[dof[i]];
      if (ei < 0) continue;
      for (int j = 0; j < nd; ++j) {
        const int ej = eq_[dof[j]];
        if (ej < 0) continue;
        k_triplets->emplace_back(ei, ej, ke(i, j));
      }
    }
  };

  Eigen::Matrix<double, 16, 1> ue, fe;
  Eigen::MatrixXd ke;
  for (size_t e = 0; e < quads_.size(); ++e) {
    const QuadCache& qc = quads_[e];
    for (int i = 0; i < 16; ++i) ue(i) = u[qc.dof[i]];
    if (qc.elastic) {
      fe = qc.ke * ue;
      if (!fe.allFinite())
        throw ModelError("non-finite force in solid element " + std::to_string(e));
      for (int i = 0; i < 16; ++i) f_int_full[qc.dof[i]] += fe(i);
      if (want_k) scatter_k(qc.dof.data(), 16, qc.ke);
      continue;
    }
    fe.setZero();
    if (want_k) {
      ke.resize(16, 16);
      ke.setZero();
    }
    const ContinuumLaw& law = solid_laws_[e];
    for (int g = 0; g < 9; ++g) {
      const auto& op = qc.op[g];
      const Eigen::Vector3d ev = op.B * ue;
      const Tensor2 eps{ev(0), ev(1), 0.0, ev(2) / 2.0};
      const size_t idx = e * 9 + g;
      const ContinuumResult r = law.update(trial.solid[idx], eps, want_k);
      const Eigen::Vector3d sv(r.stress.xx, r.stress.yy, r.stress.xy);
      const double w = solid_wv_[idx];
      fe += op.B.transpose() * (sv * w);
      if (want_k) ke += op.B.transpose() * r.tangent * op.B * w;
    }
    if (!fe.allFinite())
      throw ModelError("non-finite force in solid element " + std::to_string(e));
    for (int i = 0; i < 16; ++i) f_int_full[qc.dof[i]] += fe(i);
    if (want_k) scatter_k(qc.dof.data(), 16, ke);
  }

  Eigen::Matrix<double, 12, 1> ut, ft;
  for (size_t e = 0; e < tris_.size(); ++e) {
    const TriCache& tc = tris_[e];
    for (int i = 0; i < 12; ++i) ut(i) = u[tc.dof[i]];
    ft.setZero();
    if (want_k) {
      ke.resize(12, 12);
      ke.setZero();
    }
    for (int g = 0; g < 3; ++g) {
      const auto& op = tc.op[g];
      const Eigen::Vector3d ev = op.B * ut;
      const Tensor2 eps{ev(0), ev(1), 0.0, ev(2) / 2.0};
      const size_t idx = e * 3 + g;
      const BackfillResult r = fill_law_->update(trial.fill[idx], eps, want_k);
      const Eigen::Vector3d sv(r.stress.xx, r.stress.yy, r.stress.xy);
      const double w = tri_wv_[idx];
      ft += op.B.transpose() * (sv * w);
      if (want_k) ke += op.B.transpose() * r.tangent * op.B * w;
    }
    if (!ft.allFinite())
      throw ModelError("non-finite force in backfill element " + std::to_string(e));
    for (int i = 0; i < 12; ++i) f_int_full[tc.dof[i]] += ft(i);
    if (want_k) scatter_k(tc.dof.data(), 12, ke);
  }

  for (size_t e = 0; e < joints_.size(); ++e) {
    const JointCache& jc = joints_[e];
    for (int i = 0; i < 2; ++i) {
      const InterfaceStation& st = jc.st[i];
      const int bx = jc.dof[4 * i], by = jc.dof[4 * i + 1];
      const int tx = jc.dof[4 * i + 2], ty = jc.dof[4 * i + 3];
      const double jx = u[tx] - u[bx], jy = u[ty] - u[by];
      const double dn = jx * st.normal.x + jy * st.normal.y;
      const double dt = jx * st.tangent.x + jy * st.tangent.y;
      const size_t idx = e * 2 + i;
      const InterfaceResult r =
          jc.law->update(trial.joint[idx], dn, dt, want_k, frozen_tangent);
      const double w = st.weight;
      const double fx = (r.t_n * st.normal.x + r.t_t * st.tangent.x) * w;
      const double fy = (r.t_n * st.normal.y + r.t_t * st.tangent.y) * w;
      if (!std::isfinite(fx) || !std::isfinite(fy))
        throw ModelError("non-finite force in interface element " + std::to_string(e));
      f_int_full[bx] -= fx;
      f_int_full[by] -= fy;
      f_int_full[tx] += fx;
      f_int_full[ty] += fy;
      if (want_k) {
        Eigen::Matrix2d rot;
        rot << st.normal.x, st.normal.y, st.tangent.x, st.tangent.y;
        const Eigen::Matrix2d g = rot.transpose() * r.tangent * rot * w;
        const int dof4[4] = {bx, by, tx, ty};
        Eigen::Matrix4d blk;
        blk << g, -g, -g, g;
        for (int a = 0; a < 4; ++a) {
          const int ea = eq_[dof4[a]];
          if (ea < 0) continue;
          for (int b = 0; b < 4; ++b) {
            const int eb = eq_[dof4[b]];
            if (eb < 0) continue;
            k_triplets->emplace_back(ea, eb, blk(a, b));
          }
        }
      }
    }
  }
}

Eigen::VectorXd FeModel::reduce(const Eigen::VectorXd& full) const {
  Eigen::VectorXd red = Eigen::VectorXd::Zero(n_eq_);
  for (int d = 0; d < static_cast<int>(eq_.size()); ++d)
    if (eq_[d] >= 0) red[eq_[d]] += full[d];
  return red;
}

void FeModel::add_spread(const Eigen::VectorXd& reduced, double scale,
                         Eigen::VectorXd& full) const {
  for (int d = 0; d < static_cast<int>(eq_.size()); ++d)
    if (eq_[d] >= 0) full[d] += scale * reduced[eq_[d]];
}

double FeModel::dissipation(const GpStates& s) const {
  double w = 0.0;
  for (size_t i = 0; i < s.solid.size(); ++i)
    w += (s.solid[i].diss_plastic + s.solid[i].diss_damage) * solid_wv_[i];
  for (size_t i = 0; i < s.fill.size(); ++i) w += s.fill[i].diss * tri_wv_[i];
  for (size_t i = 0; i < s.joint.size(); ++i)
    w += (s.joint[i].W_pt + s.joint[i].W_ps + s.joint[i].W_pc +
          s.joint[i].W_fric) *
         joint_wl_[i];
  return w;
}

FeModel::CellFields FeModel::cell_fields(const Eigen::VectorXd& u,
                                         const GpStates& s) const {
  const size_t nc = quads_.size() + tris_.size() + joints_.size();
  CellFields f;
  f.damage.assign(nc, 0.0);
  f.von_mises.assign(nc, 0.0);
  f.damage_n.assign(nc, 0.0);
  f.damage_t.assign(nc, 0.0);

  Eigen::Matrix<double, 16, 1> ue;
  for (size_t e = 0; e < quads_.size(); ++e) {
    const QuadCache& qc = quads_[e];
    for (int i = 0; i < 16; ++i) ue(i) = u[qc.dof[i]];
    double vm = 0.0, dm = 0.0;
    for (int g = 0; g < 9; ++g) {
      const Eigen::Vector3d ev = qc.op[g].B * ue;
      const Tensor2 eps{ev(0), ev(1), 0.0, ev(2) / 2.0};
      if (qc.elastic) {
        vm += von_mises(mats_.brick.stress(eps));
      } else {
        ContinuumState cs = s.solid[e * 9 + g];
        const ContinuumResult r = solid_laws_[e].update(cs, eps, false);
        vm += von_mises(r.stress);
        dm += cs.d;
      }
    }
    f.von_mises[e] = vm / 9.0;
    f.damage[e] = dm / 9.0;
  }
  Eigen::Matrix<double, 12, 1> ut;
  for (size_t e = 0; e < tris_.size(); ++e) {
    const TriCache& tc = tris_[e];
    for (int i = 0; i < 12; ++i) ut(i) = u[tc.dof[i]];
    double vm = 0.0;
    for (int g = 0; g < 3; ++g) {
      const Eigen::Vector3d ev = tc.op[g].B * ut;
      const Tensor2 eps{ev(0), ev(1), 0.0, ev(2) / 2.0};
      BackfillState bs = s.fill[e * 3 + g];
      const BackfillResult r = fill_law_->update(bs, eps, false);
      vm += von_mises(r.stress);
    }
    f.von_mises[quads_.size() + e] = vm / 3.0;
  }
  for (size_t e = 0; e < joints_.size(); ++e) {
    double dn = 0.0, dt = 0.0;
    for (int i = 0; i < 2; ++i) {
      dn += s.joint[e * 2 + i].D_n;
      dt += s.joint[e * 2 + i].D_t;
    }
    const size_t c = quads_.size() + tris_.size() + e;
    f.damage_n[c] = dn / 2.0;
    f.damage_t[c] = dt / 2.0;
  }
  return f;
}

}  // namespace archcal
