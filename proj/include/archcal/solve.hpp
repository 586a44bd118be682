#pragma once
// Quasi-static solution driver.  Stage 1 ramps self weight and constant
// patch preloads under force control; stage 2 advances one rigid load platen
// under displacement control, with Newton iteration, backtracking line
// search and automatic increment halving down to 1/64 of the nominal rate.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "archcal/system.hpp"

namespace archcal {

struct LoadProtocol {
  bool gravity_on = true;
  double gamma_arch = 16.0;  // unit weight of the masonry solids, kN/m^3
  double gamma_fill = 22.0;  // unit weight of the backfill, kN/m^3
  struct Preload {
    std::string patch;
    double force_per_width = 0.0;  // kN/m, downward
    int ramp_steps = 5;
  };
  std::vector<Preload> preloads;
  std::string controlled_patch;
  double control_rate = 0.25;  // platen travel per step, mm
  int max_steps = 200;
  // Termination: load fallen below drop_fraction * peak, or platen travel
  // reaching displacement_cap, whichever first.
  double drop_fraction = 0.5;
  double displacement_cap = 40.0;  // mm

  void validate(const Mesh& mesh) const;
};

struct TraceRow {
  int step = 0;
  double time_s = 0.0;
  double F_kN_per_m = 0.0;  // platen force beyond the constant preload
  double d1_mm = 0.0;       // quarter-span deflection, downward positive
  double d2_mm = 0.0;       // three-quarter-span deflection
};

// Total boundary resultants of every tied patch; the calibration inputs.
struct PartitionRow {
  int step = 0;
  double time_s = 0.0;
  std::vector<double> force;  // kN/m, downward positive
  std::vector<double> disp;   // mm, downward positive
};

struct StepLog {
  int step = 0;
  int iterations = 0;
  int halvings = 0;
  double residual = 0.0;
};

struct RunResult {
  std::vector<TraceRow> trace;
  std::vector<std::string> partition_names;
  std::vector<PartitionRow> partitions;
  std::vector<StepLog> log;
  std::string termination;  // peak_drop | displacement_cap | max_steps | collapse reached
  std::string failure_label;
  double peak_F = 0.0;
  double peak_d1 = 0.0;
  double dissipated = 0.0;
  Eigen::VectorXd u;
  GpStates states;
};

// Preload stage failed to converge: the scenario is not statically
// admissible as posed.
struct PreloadDivergence : ModelError {
  using ModelError::ModelError;
};
// Singular tangent on the very first solve: the supports leave rigid-body
// freedom or a constraint is malformed.
struct IllPosedSystem : ModelError {
  using ModelError::ModelError;
};

using StepCallback =
    std::function<void(int step, const Eigen::VectorXd& u, const GpStates& s)>;

// `model` must have its supports fixed but not be finalized; the solver ties
// the load patches and owns the equation layout afterwards.
RunResult solve_quasi_static(FeModel& model, const LoadProtocol& protocol,
                             const StepCallback& on_step = {});

// Failure label from the final damage fields: ring_sliding, flexural_hinges,
// punching or mixed.
std::string classify_failure(const FeModel& model, const GpStates& s,
                             const std::string& loaded_patch);

}  // namespace archcal
