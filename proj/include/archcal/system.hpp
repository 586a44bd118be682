#pragma once
// Global finite-element system: binds materials to mesh entities, numbers
// the unknowns (with support fixities and rigid load platens), stores the
// quadrature-point history and assembles residual and tangent.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "archcal/backfill_law.hpp"
#include "archcal/continuum.hpp"
#include "archcal/core.hpp"
#include "archcal/elements.hpp"
#include "archcal/interface_law.hpp"
#include "archcal/mesh.hpp"

namespace archcal {

enum class Tier { kMeso, kMacro, kHybrid };

struct MaterialSet {
  Tier tier = Tier::kMeso;
  Elasticity brick{6000.0, 0.15};  // meso solids
  ContinuumParams masonry{};       // macro/hybrid solids
  InterfaceParams mortar{};        // meso radial and ring-to-ring joints
  InterfaceParams ring{};          // hybrid mid-thickness layer
  InterfaceParams bond{};          // arch-to-backfill
  BackfillParams fill{};
};

// Quadrature-point history, ordered element-major.
struct GpStates {
  std::vector<ContinuumState> solid;  // quads x 9, empty for the meso tier
  std::vector<BackfillState> fill;    // tris x 3
  std::vector<InterfaceState> joint;  // interfaces x 2
};

class FeModel {
 public:
  FeModel(Mesh mesh, const MaterialSet& mats);

  const Mesh& mesh() const { return mesh_; }
  const MaterialSet& materials() const { return mats_; }

  // Constraint layout; call before finalize().
  void fix_set(const std::string& node_set, bool fix_x, bool fix_y);
  // Collapses the vertical dofs of a patch onto one equation so the patch
  // moves as a rigid loading plate.
  void tie_patch(const std::string& patch);
  void finalize();

  int n_eq() const { return n_eq_; }
  int eq(int node, int comp) const { return eq_[2 * node + comp]; }
  int platen(const std::string& patch) const;
  bool finalized() const { return n_eq_ >= 0; }

  GpStates make_states() const;

  // Self-weight nodal forces (full-size vectors, per 1 kN/m^3 of unit
  // weight) for the masonry solids and the backfill separately.
  const Eigen::VectorXd& gravity_arch_unit() const { return grav_arch_; }
  const Eigen::VectorXd& gravity_fill_unit() const { return grav_fill_; }

  // Internal force at displacement `u` (full-size), histories advanced from
  // `base` into `trial`.  Optionally appends the reduced tangent triplets;
  // `frozen_tangent` switches the interface stiffness to the damage-frozen
  // variant, a robust fallback when the consistent one makes Newton cycle.
  // Throws PointUpdateError if a constitutive update fails to converge and
  // ModelError on non-finite element forces.
  void evaluate(const Eigen::VectorXd& u, const GpStates& base, GpStates& trial,
                Eigen::VectorXd& f_int_full,
                std::vector<Eigen::Triplet<double>>* k_triplets,
                bool frozen_tangent = false) const;

  Eigen::VectorXd reduce(const Eigen::VectorXd& full) const;
  // full += scale * spread(reduced); fixed dofs are left untouched.
  void add_spread(const Eigen::VectorXd& reduced, double scale,
                  Eigen::VectorXd& full) const;

  // Energy dissipated by the histories (plasticity + damage + friction),
  // integrated over the model per unit width.
  double dissipation(const GpStates& s) const;

  // Element-mean fields ordered quads, tris, interfaces (the VTK overlay
  // cell order).  Does not modify `s`.
  struct CellFields {
    std::vector<double> damage, von_mises, damage_n, damage_t;
  };
  CellFields cell_fields(const Eigen::VectorXd& u, const GpStates& s) const;

  // Quadrature geometry caches for classification and dissipation.
  const std::vector<Vec2>& solid_gp_pos() const { return solid_pos_; }
  const std::vector<double>& solid_gp_weight() const { return solid_wv_; }
  const std::vector<Vec2>& joint_gp_pos() const { return joint_pos_; }
  const std::vector<double>& joint_gp_weight() const { return joint_wl_; }

  const std::vector<int>& fixed_dofs() const { return fixed_dofs_; }

 private:
  struct QuadCache {
    std::array<int, 16> dof;
    std::array<BOp8, 9> op;            // macro tiers only
    Eigen::Matrix<double, 16, 16> ke;  // meso fast path
    bool elastic = false;
  };
  struct TriCache {
    std::array<int, 12> dof;
    std::array<BOp6, 3> op;
  };
  struct JointCache {
    std::array<int, 8> dof;  // per corner pair: bottom x/y then top x/y
    std::array<InterfaceStation, 2> st;
    const InterfaceLaw* law = nullptr;
  };

  const InterfaceLaw& law_for(JointRole role) const;

  Mesh mesh_;
  MaterialSet mats_;
  std::vector<ContinuumLaw> solid_laws_;  // per quad, macro tiers
  // Laws are built only when the tier and mesh actually use them; unused
  // parameter blocks stay unvalidated.
  std::optional<InterfaceLaw> mortar_law_, ring_law_, bond_law_;
  std::optional<BackfillLaw> fill_law_;
  Eigen::Matrix3d brick_d_;

  std::vector<int> eq_;  // per dof: >=0 equation, -1 fixed, -2 unnumbered
  int n_eq_ = -1;
  std::map<std::string, int> platen_eq_;
  std::vector<std::string> tied_;
  std::vector<int> fixed_dofs_;

  std::vector<QuadCache> quads_;
  std::vector<TriCache> tris_;
  std::vector<JointCache> joints_;
  std::vector<Vec2> solid_pos_;
  std::vector<double> solid_wv_;
  std::vector<double> tri_wv_;
  std::vector<Vec2> joint_pos_;
  std::vector<double> joint_wl_;
  Eigen::VectorXd grav_arch_, grav_fill_;
};

}  // namespace archcal
