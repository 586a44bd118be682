#include "archcal/solve.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

namespace archcal {

void LoadProtocol::validate(const Mesh& mesh) const {
  if (controlled_patch.empty())
    throw InputError("protocol names no controlled patch");
  if (!mesh.patches.count(controlled_patch))
    throw InputError("controlled patch '" + controlled_patch + "' not in mesh");
  if (!(control_rate > 0.0)) throw InputError("control_rate must be positive");
  if (max_steps < 0) throw InputError("max_steps must be non-negative");
  if (!(drop_fraction > 0.0 && drop_fraction <= 1.0))
    throw InputError("drop_fraction must lie in (0, 1]");
  if (!(displacement_cap > 0.0))
    throw InputError("displacement_cap must be positive");
  for (const auto& p : preloads) {
    if (!mesh.patches.count(p.patch))
      throw InputError("preload patch '" + p.patch + "' not in mesh");
    if (p.force_per_width < 0.0) throw InputError("preload force must be >= 0");
    if (p.ramp_steps < 1) throw InputError("preload ramp needs >= 1 step");
  }
}

namespace {

constexpr double kControlVelocity = 0.1;  // mm/s, pseudo-time mapping
constexpr double kPreloadSpan = 1.0;      // s of pseudo-time for stage 1
constexpr int kMaxNewton = 60;
constexpr int kMaxLineSearch = 6;
constexpr double kForceTol = 1e-6;
constexpr double kEnergyTol = 1e-8;
constexpr double kReactionTol = 1e-8;
constexpr double kMinFrac = 1.0 / 64.0;

// Consistent nodal weights of a uniform vertical traction over the quadratic
// edges of a patch; the weights sum to the integrated edge length.
std::vector<std::pair<int, double>> patch_weights(const Mesh& mesh,
                                                  const Patch& p) {
  std::map<int, double> w;
  const double gp[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  for (const auto& e : p.edges) {
    const Vec2 a = mesh.nodes[e[0]], m = mesh.nodes[e[1]], b = mesh.nodes[e[2]];
    for (int g = 0; g < 3; ++g) {
      const double s = gp[g];
      const double N[3] = {0.5 * s * (s - 1.0), 1.0 - s * s,
                           0.5 * s * (s + 1.0)};
      const double dN[3] = {s - 0.5, -2.0 * s, s + 0.5};
      const double jx = dN[0] * a.x + dN[1] * m.x + dN[2] * b.x;
      const double jy = dN[0] * a.y + dN[1] * m.y + dN[2] * b.y;
      const double det = std::hypot(jx, jy);
      for (int i = 0; i < 3; ++i) w[e[i]] += gw[g] * N[i] * det;
    }
  }
  return {w.begin(), w.end()};
}

// Shared context of the Newton loops for both load stages.
struct Driver {
  FeModel& model;
  const LoadProtocol& proto;
  Eigen::VectorXd u;
  GpStates committed, trial, scratch;
  Eigen::VectorXd f_grav_full;        // at unit load factor
  Eigen::VectorXd f_point_full;       // preload tractions at unit factor
  double grav_total_y = 0.0;          // sum of vertical self-weight loads
  double preload_total = 0.0;         // sum of preload magnitudes
  Eigen::SparseMatrix<double> k;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool pattern_done = false;
  bool first_solve = true;
  std::vector<int> control_dofs;
  int control_eq = -1;
  Eigen::VectorXd f_int_red;  // of the last accepted evaluation
  double last_rnorm = 0.0;
  double lambda = 0.0;  // stage-1 load factor

  explicit Driver(FeModel& m, const LoadProtocol& p) : model(m), proto(p) {}

  Eigen::VectorXd external_reduced(double lam) const {
    return model.reduce(f_grav_full + f_point_full) * lam;
  }

  // Residual of active equations; the prescribed platen row is masked.
  static void mask(Eigen::VectorXd& v, int eq) {
    if (eq >= 0) v[eq] = 0.0;
  }

  bool reactions_balanced(const Eigen::VectorXd& f_int_full, double lam,
                          double platen_extra) const {
    double rx = 0.0, ry = 0.0;
    for (int d : model.fixed_dofs()) {
      const double r = f_int_full[d] - lam * (f_grav_full[d] + f_point_full[d]);
      if (d % 2 == 0)
        rx += r;
      else
        ry += r;
    }
    const double wy = lam * grav_total_y - lam * preload_total + platen_extra;
    const double scale = std::max({std::fabs(wy), std::fabs(ry), 1e-3});
    return std::fabs(ry + wy) <= kReactionTol * scale &&
           std::fabs(rx) <= kReactionTol * scale;
  }

  // One Newton solve towards equilibrium with externals at factor `lam` and
  // the platen equation prescribed (frozen) when `prescribed` is true.
  // Returns true on convergence; `iters` reports the Newton count.
  bool newton(double lam, bool prescribed, int& iters) {
    const int p = control_eq;
    const Eigen::VectorXd f_ext = external_reduced(lam);
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd f_int_full, f_try;
    double e0 = -1.0, e_last = -1.0;
    double damp = 1.0;  // persistent step damping against active-set chatter
    int nm_used = 0;    // non-monotone acceptances spent this solve
    int wd_used = 0;    // watchdog hops spent this solve
    int streak = 0;     // consecutive full steps with strict decrease
    bool frozen = false;  // damage-frozen interface tangents (fallback mode)
    const bool dbg = std::getenv("ARCHCAL_DEBUG_NEWTON") != nullptr;
    for (iters = 0; iters < kMaxNewton; ++iters) {
      try {
        model.evaluate(u, committed, trial, f_int_full, &trips, frozen);
      } catch (const PointUpdateError& ex) {
        if (dbg) std::fprintf(stderr, "[newton] eval threw: %s (iter %d)\n", ex.what(), iters);
        return false;
      }
      f_int_red = model.reduce(f_int_full);
      Eigen::VectorXd r = f_int_red - f_ext;
      double platen_extra = 0.0;
      if (prescribed && p >= 0) {
        platen_extra = r[p];
        r[p] = 0.0;
      }
      Eigen::VectorXd f_scale_vec = f_ext;
      if (prescribed) mask(f_scale_vec, p);
      const double scale =
          std::max({f_scale_vec.norm(), f_int_red.norm() * 1e-3, 1e-3});
      const double rnorm = r.norm();
      const bool force_ok = rnorm <= kForceTol * scale;
      const bool energy_ok =
          e_last < 0.0 ? iters == 0 && rnorm <= 0.01 * kForceTol * scale
                       : e_last <= kEnergyTol * std::max(e0, 1e-300);
      if (force_ok && energy_ok &&
          reactions_balanced(f_int_full, lam, prescribed ? platen_extra : 0.0)) {
        last_rnorm = rnorm;
        return true;
      }

      // Assemble with the prescribed row/column zeroed but the sparsity
      // pattern kept identical across stages.
      if (prescribed && p >= 0)
        for (auto& t : trips)
          if (t.row() == p || t.col() == p)
            t = Eigen::Triplet<double>(t.row(), t.col(), 0.0);
      if (p >= 0)
        trips.emplace_back(p, p, prescribed ? 1.0 : 0.0);
      k.resize(model.n_eq(), model.n_eq());
      k.setFromTriplets(trips.begin(), trips.end());
      if (!pattern_done) {
        lu.analyzePattern(k);
        pattern_done = true;
      }
      lu.factorize(k);
      if (lu.info() != Eigen::Success) {
        if (first_solve)
          throw IllPosedSystem(
              "singular tangent on the first solve: check supports");
        return false;
      }
      const Eigen::VectorXd du = lu.solve(-r);
      if (first_solve) {
        // SparseLU can slide through a structurally singular system without
        // flagging it; a garbage solution betrays itself in backward error.
        const double rn = r.norm();
        if (!du.allFinite() || (rn > 0.0 && (k * du + r).norm() > 1e-6 * rn))
          throw IllPosedSystem(
              "singular tangent on the first solve: check supports");
      }
      first_solve = false;
      e_last = std::fabs(du.dot(r));
      if (e0 < 0.0) e0 = std::max(e_last, 1e-300);

      // Backtracking line search on the residual norm.  When it stalls on
      // active-set chatter (the residual bouncing between two trial states),
      // the best damped trial is accepted anyway a few times with the step
      // damping kept for later iterations; that breaks two-cycles that a
      // strict descent rule rides forever.
      double alpha = damp;
      bool accepted = false;
      double best_rn = -1.0;
      Eigen::VectorXd best_u;
      int threw = 0;
      std::string threw_what;
      for (int ls = 0; ls <= kMaxLineSearch; ++ls) {
        Eigen::VectorXd u_try = u;
        model.add_spread(du, alpha, u_try);
        bool eval_ok = true;
        try {
          model.evaluate(u_try, committed, scratch, f_try, nullptr);
        } catch (const PointUpdateError& ex) {
          eval_ok = false;
          ++threw;
          threw_what = ex.what();
        }
        if (eval_ok) {
          Eigen::VectorXd r_try = model.reduce(f_try) - f_ext;
          if (prescribed) mask(r_try, p);
          const double rn = r_try.norm();
          if (rn < rnorm * (1.0 - 1e-4 * alpha) || rn <= kForceTol * scale) {
            u = u_try;
            accepted = true;
            if (ls == 0) {
              if (++streak >= 2) damp = 1.0;
            } else {
              streak = 0;
            }
            break;
          }
          if (best_rn < 0.0 || rn < best_rn) {
            best_rn = rn;
            best_u = u_try;
          }
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        // Backtracking found nothing.  First recompute the direction with
        // damage-frozen interface tangents: the consistent operator can spin
        // a limit cycle around a kink that the stiffer secant walks through.
        if (!frozen) {
          frozen = true;
          if (dbg)
            std::fprintf(stderr, "[newton] switching to frozen tangents at iter %d\n", iters);
          continue;
        }
        // Still stuck: hop out with the raw full step regardless of its
        // residual and let the next iterations re-descend; fall back to the
        // least-bad damped trial.
        if (wd_used < 6) {
          Eigen::VectorXd u_try = u;
          model.add_spread(du, 1.0, u_try);
          bool ok = true;
          double rn_try = -1.0;
          try {
            model.evaluate(u_try, committed, scratch, f_try, nullptr);
            Eigen::VectorXd r_try = model.reduce(f_try) - f_ext;
            if (prescribed) mask(r_try, p);
            rn_try = r_try.norm();
          } catch (const PointUpdateError& ex) {
            ok = false;
            if (dbg)
              std::fprintf(stderr, "[newton] watchdog full step threw: %s\n", ex.what());
          }
          // A hop may raise the residual while crossing a kink, but a blown-up
          // full step is divergence, not a basin change.
          if (ok && std::isfinite(rn_try) && rn_try <= 100.0 * rnorm) {
            if (dbg)
              std::fprintf(stderr, "[newton] watchdog hop at iter %d (rnorm=%.3e -> %.3e)\n",
                           iters, rnorm, rn_try);
            u = u_try;
            ++wd_used;
            damp = 1.0;
            streak = 0;
            continue;
          }
        }
        if (best_rn >= 0.0 && best_rn <= 1.25 * rnorm && nm_used < 16) {
          u = best_u;
          ++nm_used;
          damp = std::max(0.25 * damp, 0.0625);
          streak = 0;
          continue;
        }
        if (dbg)
          std::fprintf(stderr,
                       "[newton] line search dead at iter %d: rnorm=%.3e best=%.3e scale=%.3e "
                       "nm=%d threw=%d%s%s\n",
                       iters, rnorm, best_rn, scale, nm_used, threw,
                       threw ? " last=" : "", threw ? threw_what.c_str() : "");
        return false;
      }
      last_rnorm = rnorm;
    }
    if (dbg)
      std::fprintf(stderr, "[newton] out of iterations: rnorm=%.3e e_last=%.3e e0=%.3e\n",
                   last_rnorm, e_last, e0);
    return false;
  }
};

}  // namespace

RunResult solve_quasi_static(FeModel& model, const LoadProtocol& proto,
                             const StepCallback& on_step) {
  proto.validate(model.mesh());
  if (model.finalized())
    throw ModelError("model already finalized; one run per model instance");

  // Only the velocity-driven patch acts as a rigid platen; preload patches
  // carry plain distributed tractions and stay free to deform.
  model.tie_patch(proto.controlled_patch);
  model.finalize();

  Driver drv(model, proto);
  drv.u = Eigen::VectorXd::Zero(model.mesh().dof_count());
  drv.committed = model.make_states();
  drv.trial = model.make_states();
  drv.scratch = model.make_states();
  drv.control_eq = model.platen(proto.controlled_patch);
  for (int d = 0; d < model.mesh().dof_count(); ++d)
    if (model.eq(d / 2, d % 2) == drv.control_eq) drv.control_dofs.push_back(d);

  drv.f_grav_full = Eigen::VectorXd::Zero(model.mesh().dof_count());
  if (proto.gravity_on) {
    drv.f_grav_full = proto.gamma_arch * model.gravity_arch_unit() +
                      proto.gamma_fill * model.gravity_fill_unit();
    for (int d = 1; d < model.mesh().dof_count(); d += 2)
      drv.grav_total_y += drv.f_grav_full[d];
  }
  drv.f_point_full = Eigen::VectorXd::Zero(model.mesh().dof_count());
  int ramp_steps = proto.gravity_on ? 5 : 0;
  for (const auto& pl : proto.preloads) {
    const auto w = patch_weights(model.mesh(), model.mesh().patches.at(pl.patch));
    double total = 0.0;
    for (const auto& [nid, wi] : w) total += wi;
    for (const auto& [nid, wi] : w)
      drv.f_point_full[2 * nid + 1] -= pl.force_per_width * wi / total;
    drv.preload_total += pl.force_per_width;
    ramp_steps = std::max(ramp_steps, pl.ramp_steps);
  }

  RunResult out;
  out.partition_names = {proto.controlled_patch};
  for (const auto& pl : proto.preloads)
    if (std::find(out.partition_names.begin(), out.partition_names.end(),
                  pl.patch) == out.partition_names.end())
      out.partition_names.push_back(pl.patch);
  // Normalised edge weights for averaging displacements, and the constant
  // traction carried by each partition (zero entry = the platen itself).
  std::vector<std::vector<std::pair<int, double>>> part_w;
  std::vector<double> part_load(out.partition_names.size(), 0.0);
  for (size_t i = 0; i < out.partition_names.size(); ++i) {
    auto w = patch_weights(model.mesh(),
                           model.mesh().patches.at(out.partition_names[i]));
    double total = 0.0;
    for (const auto& [nid, wi] : w) total += wi;
    for (auto& [nid, wi] : w) wi /= total;
    part_w.push_back(std::move(w));
    for (const auto& pl : proto.preloads)
      if (pl.patch == out.partition_names[i] && i > 0)
        part_load[i] += pl.force_per_width;
  }
  const auto& mon1 = model.mesh().node_sets.at("monitor_quarter");
  const auto& mon2 = model.mesh().node_sets.at("monitor_three_quarter");
  const int d1_dof = 2 * mon1.front() + 1, d2_dof = 2 * mon2.front() + 1;

  int step_id = 0;
  double diss_prev = 0.0;
  auto record = [&](double time_s, double platen_extra) {
    TraceRow row;
    row.step = step_id;
    row.time_s = time_s;
    row.F_kN_per_m = -platen_extra;
    row.d1_mm = -drv.u[d1_dof];
    row.d2_mm = -drv.u[d2_dof];
    out.trace.push_back(row);
    PartitionRow pr;
    pr.step = step_id;
    pr.time_s = time_s;
    for (size_t i = 0; i < out.partition_names.size(); ++i) {
      pr.force.push_back(i == 0 ? -drv.f_int_red[drv.control_eq]
                                : drv.lambda * part_load[i]);
      double dm = 0.0;
      for (const auto& [nid, wi] : part_w[i]) dm -= wi * drv.u[2 * nid + 1];
      pr.disp.push_back(dm);
    }
    out.partitions.push_back(pr);
  };
  auto commit = [&](int iters, int halvings) {
    drv.committed = drv.trial;
    const double diss = model.dissipation(drv.committed);
    if (diss < diss_prev - 1e-9 * std::max(1.0, diss_prev))
      throw ModelError("dissipation decreased between converged steps");
    diss_prev = diss;
    StepLog lg;
    lg.step = step_id;
    lg.iterations = iters;
    lg.halvings = halvings;
    lg.residual = drv.last_rnorm;
    out.log.push_back(lg);
  };

  // Stage 1: force-controlled ramp of self weight and preloads.
  if (ramp_steps > 0 && (proto.gravity_on || drv.preload_total > 0.0)) {
    double dl = 1.0 / ramp_steps;
    while (drv.lambda < 1.0 - 1e-12) {
      const double target = std::min(1.0, drv.lambda + dl);
      int iters = 0;
      int halvings = 0;
      if (drv.newton(target, false, iters)) {
        drv.lambda = target;
        ++step_id;
        commit(iters, halvings);
        record((drv.lambda - 1.0) * kPreloadSpan, 0.0);
      } else {
        dl *= 0.5;
        if (dl < kMinFrac / ramp_steps)
          throw PreloadDivergence("preload stage failed to converge");
      }
    }
  } else {
    drv.lambda = proto.gravity_on || drv.preload_total > 0.0 ? drv.lambda : 1.0;
  }
  if (on_step) on_step(0, drv.u, drv.committed);

  // Stage 2: displacement control of the platen.
  double travel = 0.0;
  double frac = 1.0;
  int stage2_steps = 0;
  out.termination = "max_steps";
  while (stage2_steps < proto.max_steps) {
    const double dd = proto.control_rate * frac;
    const Eigen::VectorXd u_save = drv.u;
    for (int d : drv.control_dofs) drv.u[d] -= dd;
    int iters = 0;
    if (!drv.newton(1.0, true, iters)) {
      drv.u = u_save;
      frac *= 0.5;
      if (frac < kMinFrac - 1e-12) {
        out.termination = "collapse reached";
        break;
      }
      continue;
    }
    travel += dd;
    ++stage2_steps;
    ++step_id;
    commit(iters, static_cast<int>(std::lround(std::log2(1.0 / frac))));
    const double platen_extra =
        drv.f_int_red[drv.control_eq] - drv.external_reduced(1.0)[drv.control_eq];
    record(travel / kControlVelocity, platen_extra);
    if (on_step) on_step(step_id, drv.u, drv.committed);
    const double F = out.trace.back().F_kN_per_m;
    if (F > out.peak_F) {
      out.peak_F = F;
      out.peak_d1 = out.trace.back().d1_mm;
    }
    if (out.peak_F > 1.0 && F < proto.drop_fraction * out.peak_F) {
      out.termination = "peak_drop";
      break;
    }
    if (travel >= proto.displacement_cap - 1e-12) {
      out.termination = "displacement_cap";
      break;
    }
    frac = std::min(1.0, frac * 2.0);
  }

  out.dissipated = diss_prev;
  out.u = drv.u;
  out.states = drv.committed;
  out.failure_label = classify_failure(model, out.states, proto.controlled_patch);
  return out;
}

std::string classify_failure(const FeModel& model, const GpStates& s,
                             const std::string& loaded_patch) {
  const Mesh& mesh = model.mesh();
  const ArchGeometry& g = mesh.geom;
  const Vec2 c = g.center();

  // Ring sliding: shear damage saturating the ring-to-ring interfaces.
  int circ_total = 0, circ_damaged = 0;
  for (size_t e = 0; e < mesh.interfaces.size(); ++e) {
    if (mesh.interfaces[e].role != JointRole::kCircumferential) continue;
    for (int i = 0; i < 2; ++i) {
      ++circ_total;
      if (s.joint[e * 2 + i].D_t > 0.8) ++circ_damaged;
    }
  }
  if (circ_total > 0 && circ_damaged >= 0.30 * circ_total) return "ring_sliding";

  // Flexural hinges: clusters of through-thickness tensile damage.
  struct Pt {
    double angle, radius;
  };
  std::vector<Pt> cracks;
  for (size_t e = 0; e < mesh.interfaces.size(); ++e) {
    if (mesh.interfaces[e].role != JointRole::kRadial) continue;
    for (int i = 0; i < 2; ++i)
      if (s.joint[e * 2 + i].D_n > 0.8) {
        const Vec2 p = model.joint_gp_pos()[e * 2 + i];
        cracks.push_back({std::atan2(p.x - c.x, p.y - c.y),
                          std::hypot(p.x - c.x, p.y - c.y)});
      }
  }
  for (size_t i = 0; i < s.solid.size(); ++i)
    if (s.solid[i].d > 0.8) {
      const Vec2 p = model.solid_gp_pos()[i];
      cracks.push_back({std::atan2(p.x - c.x, p.y - c.y),
                        std::hypot(p.x - c.x, p.y - c.y)});
    }
  std::sort(cracks.begin(), cracks.end(),
            [](const Pt& a, const Pt& b) { return a.angle < b.angle; });
  const double gap = 0.6 * g.joint_pitch() / g.centerline_radius();
  const double ri = g.intrados_radius(), ro = g.extrados_radius();
  int hinges = 0;
  size_t i = 0;
  while (i < cracks.size()) {
    size_t j = i;
    double rmin = cracks[i].radius, rmax = cracks[i].radius;
    while (j < cracks.size() &&
           (j == i || cracks[j].angle - cracks[j - 1].angle <= gap)) {
      rmin = std::min(rmin, cracks[j].radius);
      rmax = std::max(rmax, cracks[j].radius);
      ++j;
    }
    if (rmax - rmin > 0.6 * (ro - ri)) ++hinges;
    i = j;
  }
  if (hinges >= 3) return "flexural_hinges";

  // Punching: continuum tensile damage concentrated under the load.
  const Patch& patch = mesh.patches.at(loaded_patch);
  Vec2 pc{0.0, 0.0};
  int n = 0;
  for (const auto& e : patch.edges)
    for (int a = 0; a < 3; ++a) {
      pc.x += mesh.nodes[e[a]].x;
      pc.y += mesh.nodes[e[a]].y;
      ++n;
    }
  pc.x /= n;
  pc.y /= n;
  double v_damaged = 0.0, v_near = 0.0;
  for (size_t k = 0; k < s.solid.size(); ++k) {
    if (s.solid[k].d <= 0.8) continue;
    const double w = model.solid_gp_weight()[k];
    v_damaged += w;
    const Vec2 p = model.solid_gp_pos()[k];
    if (std::hypot(p.x - pc.x, p.y - pc.y) <= 1.5 * patch.length) v_near += w;
  }
  if (v_damaged > 0.0 && v_near >= 0.70 * v_damaged) return "punching";
  return "mixed";
}

}  // namespace archcal
