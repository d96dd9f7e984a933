#pragma once

#include <string>
#include <vector>

#include "ats/formulations.hpp"
#include "ats/heuristics.hpp"
#include "ats/model.hpp"
#include "ats/scenario_tree.hpp"
#include "ats/tree_gen.hpp"

namespace ats {

// One generation technology. Acquisitions are integer unit counts; a unit
// contributes effective_capacity to generation limits and is priced at
// unit_capacity (nameplate). First-period costs scale by the per-year trend
// multipliers: cost_at(t) = cost * trend^(t-1).
struct GenExpResource {
  std::string name;
  bool traditional = false;      // expansion capped near the initial fleet
  double initial_units = 0.0;    // units already installed
  double max_units = 0.0;        // cap on installed units per scenario path
  double unit_capacity = 0.0;    // nameplate capacity per unit (GW)
  double effective_capacity = 0.0;  // usable capacity per unit (GW)
  double peak_contribution = 1.0;   // fraction counted toward load coverage
  double acquisition_cost = 0.0;    // M$ per GW of nameplate, first period
  double fixed_om_cost = 0.0;       // M$ per GW-year, charged acquisition..horizon
  double fuel_cost = 0.0;           // M$ per GWh generated
  double generation_cost = 0.0;     // M$ per GWh generated (non-fuel)
  double acquisition_trend = 1.0;   // per-year multiplier on acquisition_cost
  double fixed_om_trend = 1.0;
  double fuel_trend = 1.0;
  double generation_trend = 1.0;
};

// Generation expansion planning data over a scenario tree whose payloads
// carry one demand field per load subperiod (genexp_demand_field). At every
// node, generation u(i,k) per resource and subperiod is limited by installed
// effective capacity, and weighted generation plus curtailment v(k) must
// cover demand in each subperiod. Objective: discounted acquisition cost
// (purchase plus remaining-horizon fixed O&M, priced per nameplate unit)
// plus discounted variable generation cost over subperiod hours plus the
// curtailment penalty.
struct GenExpData {
  std::vector<GenExpResource> resources;
  std::vector<std::string> subperiods;      // e.g. peak/shoulder/off-peak/base
  std::vector<std::vector<double>> hours;   // per subperiod: 1 entry or 1 per stage
  std::vector<double> root_demand;          // per subperiod, first-stage load (GW)
  double curtailment_penalty = 0.0;         // M$ per GWh unmet
  double interest_rate = 0.0;               // yearly discount rate
  std::string provenance;                   // free-text data lineage notes

  int resource_count() const { return static_cast<int>(resources.size()); }
  int subperiod_count() const { return static_cast<int>(subperiods.size()); }
  double hours_at(int k, int t) const;
  double acquisition_at(int i, int t) const;
  double fixed_om_at(int i, int t) const;
  double fuel_at(int i, int t) const;
  double generation_at(int i, int t) const;
  // 1 / (1+r)^(t-1).
  double discount(int t) const;
  // Objective cost of one unit of resource i acquired at stage t, horizon T:
  // discount(t) * (acquisition_at(t) + sum_{s=t..T} fixed_om_at(t)/(1+r)^(s-t))
  // * unit_capacity. Fixed O&M is locked at the acquisition-period price.
  double unit_acquisition_cost(int i, int t, int horizon) const;

  // Throws InvalidConfig / DimensionMismatch on inconsistent data; the cap
  // of a traditional resource must stay within 20% above its initial fleet.
  void validate() const;
};

// JSON schema (see README): {"resources": [{...}], "subperiods": [...],
// "hours": [[...]], "root_demand": [...], "curtailment_penalty": w,
// "interest_rate": r, "provenance": "..."}.
GenExpData genexp_from_json(const std::string& text);
GenExpData load_genexp(const std::string& path);
std::string genexp_to_json(const GenExpData& data);

// Payload field carrying the demand of one subperiod: "demand[<name>]".
std::string genexp_demand_field(const std::string& subperiod);

// Tree generator config whose root payload holds the dataset's subperiod
// demands; alpha vectors as in TreeGenConfig (size 1 or stage_count-1).
TreeGenConfig genexp_tree_config(const GenExpData& data, int branch_count, int stage_count,
                                 const std::vector<double>& alpha_low,
                                 const std::vector<double>& alpha_high, std::uint64_t seed);

// Model builders mirroring the capacity expansion shapes: x per (resource,
// node) for multistage, per (resource, stage) for two-stage, per condensed
// node for a fixed revision vector, and node-wise x with revision binaries
// r(i,t) plus deactivatable tying rows for the joint model. Acquisition caps
// bound every path sum at the leaves; acquisition variables and the joint
// model's tying constant use the structural headroom max_units -
// initial_units, so no objective-derived bound is needed.
ModelInstance build_genexp_multistage(const ScenarioTree& tree, const GenExpData& data);
ModelInstance build_genexp_twostage(const ScenarioTree& tree, const GenExpData& data);
ModelInstance build_genexp_fixed(const ScenarioTree& tree, const GenExpData& data,
                                 const RevisionVector& revisions);
ModelInstance build_genexp_joint(const ScenarioTree& tree, const GenExpData& data);

// Units of resource i a node's generation plan needs beyond the initial
// fleet: max over subperiods of u(i,k,n)/effective_capacity - initial_units,
// clipped at zero. Feeds the single-resource bounds machinery.
std::vector<std::vector<double>> genexp_implied_demands(const ScenarioTree& tree,
                                                        const GenExpData& data,
                                                        const ModelInstance& model,
                                                        const Solution& solution);

// Method adapter for the revision-selection heuristics. Captures tree and
// data by reference; keep both alive while the hooks are in use.
MethodHooks genexp_hooks(const ScenarioTree& tree, const GenExpData& data);

HeuristicResult genexp_ts_relax(const ScenarioTree& tree, const GenExpData& data,
                                const SolverConfig& config = {});
HeuristicResult genexp_ms_relax(const ScenarioTree& tree, const GenExpData& data,
                                const SolverConfig& config = {});
HeuristicResult genexp_ats_relax(const ScenarioTree& tree, const GenExpData& data,
                                 const SolverConfig& config = {});
HeuristicResult genexp_exact_ats(const ScenarioTree& tree, const GenExpData& data,
                                 const SolverConfig& config = {});
GainLossTable genexp_gain_loss_table(const ScenarioTree& tree, const GenExpData& data,
                                     const SolverConfig& config = {});

// Acquired units per resource at one reported node.
struct ExpansionEntry {
  int node = 0;
  int stage = 0;
  std::vector<double> units;  // per resource, rounded to integers
};

// Readable digest of a solved design: the revision times, the acquisitions
// at every node that buys something or sits at a resource's revision stage,
// and the objective split into acquisition, generation, and curtailment
// parts (their sum reproduces the solver objective).
struct ExpansionPlanSummary {
  RevisionVector revisions;
  std::vector<ExpansionEntry> entries;
  double acquisition_cost = 0.0;
  double generation_cost = 0.0;
  double curtailment_cost = 0.0;
  double objective = 0.0;
};

// Works with any builder's solution: per-node acquisitions are read from
// x(i,n) when present, else from the condensed x(i,c...) of the resource's
// revision time, else from the stage-shared x(i,s...). revisions must be the
// vector the model was built under (all ones for two-stage, all stage_count
// for multistage).
ExpansionPlanSummary extract_expansion_plan(const ScenarioTree& tree, const GenExpData& data,
                                            const ModelInstance& model, const Solution& solution,
                                            const RevisionVector& revisions);

std::string expansion_plan_json(const ExpansionPlanSummary& plan);

}  // namespace ats
