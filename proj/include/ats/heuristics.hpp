#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ats/formulations.hpp"
#include "ats/model.hpp"
#include "ats/scenario_tree.hpp"

namespace ats {

// Outcome of one revision-selection method: the chosen revision times, the
// objective of the capacity model solved under them, and whatever optimality
// certificates the method produces. lower_bound, when present, bounds the
// optimal revision-optimizing objective from below; guarantee, when present,
// bounds objective minus that optimum from above.
struct HeuristicResult {
  RevisionVector revisions;
  double objective = std::numeric_limits<double>::quiet_NaN();
  SolveStatus status = SolveStatus::Optimal;  // status of the final solve
  std::optional<double> lower_bound;
  std::optional<double> gap_percent;  // 100 (objective - lower_bound) / objective
  std::optional<double> guarantee;
  double wall_time_s = 0.0;
};

// Problem-family adapter. The revision-selection methods below only need
// model builders, a per-resource demand reduction, and per-node unit
// acquisition costs; any problem that can supply these plugs in here. The
// joint builder must name acquisition variables x... and revision binaries
// r(i,t) (the relaxation step strips integrality by first letter, and
// revision times are read back through revisions_from_solution).
struct MethodHooks {
  int resource_count = 0;
  std::function<ModelInstance()> multistage;
  std::function<ModelInstance()> twostage;
  std::function<ModelInstance(const RevisionVector&)> fixed;
  // Joint revision MILP under the given per-resource acquisition caps.
  std::function<ModelInstance(const std::vector<double>&)> joint;
  // Valid caps for the joint model; incumbent is a known objective upper
  // bound, or NaN when none is available yet.
  std::function<std::vector<double>(double incumbent)> joint_bounds;
  // Set when joint_bounds derives the caps from an objective bound rather
  // than structural limits: the methods then solve the two-stage model
  // first and reuse its objective as incumbent and branch-and-bound cutoff.
  bool bounds_need_incumbent = false;
  // delta[i][n]: demand implied for resource i at node n by a solved model.
  std::function<std::vector<std::vector<double>>(const ModelInstance&, const Solution&)> implied;
  // Per-node unit acquisition cost of resource i (probabilities excluded).
  std::function<std::vector<double>(int i)> unit_costs;
};

// Hooks for the capacity expansion family. Captures tree and data by
// reference; keep both alive while the hooks are in use.
MethodHooks capacity_hooks(const ScenarioTree& tree, const CapacityExpansionData& data);

HeuristicResult ts_relax_with(const ScenarioTree& tree, const MethodHooks& hooks,
                              const SolverConfig& config = {});
HeuristicResult ms_relax_with(const ScenarioTree& tree, const MethodHooks& hooks,
                              const SolverConfig& config = {});
HeuristicResult ats_relax_with(const ScenarioTree& tree, const MethodHooks& hooks,
                               const SolverConfig& config = {},
                               bool relax_revision_binaries = false);
HeuristicResult exact_ats_with(const ScenarioTree& tree, const MethodHooks& hooks,
                               const SolverConfig& config = {});

// Picks each resource's revision time by maximizing the analytic lower bound
// on the gain over the static design, evaluated on demands implied by the
// two-stage LP relaxation, net of the integer-rounding penalty; then solves
// the fixed-revision model. Emits no lower bound.
HeuristicResult ts_relax(const ScenarioTree& tree, const CapacityExpansionData& data,
                         const SolverConfig& config = {});

// Picks revision times by minimizing the analytic upper bound on the loss
// against the fully adaptive design, evaluated on demands implied by the
// multistage LP relaxation, plus the rounding penalty; then solves the
// fixed-revision model. lower_bound is the multistage LP value.
HeuristicResult ms_relax(const ScenarioTree& tree, const CapacityExpansionData& data,
                         const SolverConfig& config = {});

// Solves the joint revision model with acquisitions relaxed to continuous
// (revision binaries stay integral unless relax_revision_binaries is set, in
// which case t*_i rounds sum_t t*r(i,t) to the nearest stage), reads off the
// revision times, and solves the fixed-revision model. lower_bound is the
// relaxation objective; guarantee is the rounding-residual certificate
// sum_i max-residual_i * a_i(root), never more than sum_i a_i(root).
// x_upper: per-resource acquisition caps for the joint model; empty derives
// them from the two-stage optimum (requires strictly positive
// probability-weighted acquisition costs).
HeuristicResult ats_relax(const ScenarioTree& tree, const CapacityExpansionData& data,
                          const SolverConfig& config = {},
                          const std::vector<double>& x_upper = {},
                          bool relax_revision_binaries = false);

// Solves the joint revision MILP itself. When x_upper is empty the two-stage
// optimum is solved first to derive valid caps and a pruning cutoff.
// lower_bound is the branch-and-bound best bound; a TimeLimit status is
// passed through with the incumbent.
HeuristicResult exact_ats(const ScenarioTree& tree, const CapacityExpansionData& data,
                          const SolverConfig& config = {},
                          const std::vector<double>& x_upper = {});

// One comparison row per method, in the report layout used by the sweep
// harness: objective plus percentage gain over the static design, loss over
// the fully adaptive design, and optimality gap where the method certifies
// one.
struct MethodRow {
  std::string method;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> gain_percent;  // 100 (V^TS - V) / V^TS
  std::optional<double> loss_percent;  // 100 (V - V^MS) / V^MS
  std::optional<double> gap_percent;
  bool time_limited = false;
  double wall_time_s = 0.0;
};

struct GainLossTable {
  double v_ms = std::numeric_limits<double>::quiet_NaN();
  double v_ts = std::numeric_limits<double>::quiet_NaN();
  std::vector<MethodRow> rows;  // MS, ATS, TS-Relax, MS-Relax, ATS-Relax, TS
  // Revision times of the design behind the ATS row (the incumbent's when
  // that solve hit its limit).
  RevisionVector ats_revisions;
  // 100 (V^TS - V^ATS) / V^TS; computed from the TS-Relax objective (and
  // flagged as a lower bound) when the exact solve hits its limit.
  double rvats_percent = std::numeric_limits<double>::quiet_NaN();
  bool rvats_is_lower_bound = false;
};

GainLossTable gain_loss_table_with(const ScenarioTree& tree, const MethodHooks& hooks,
                                   const SolverConfig& config = {});

GainLossTable gain_loss_table(const ScenarioTree& tree, const CapacityExpansionData& data,
                              const SolverConfig& config = {});

// Single header+row CSV in the table layout; cells the method did not finish
// in time hold "-".
std::string gain_loss_csv(const GainLossTable& table);
std::string gain_loss_json(const GainLossTable& table);

}  // namespace ats
