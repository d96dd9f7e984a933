#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ats/genexp.hpp"
#include "ats/heuristics.hpp"

namespace ats {

// Stage multiplier envelopes for variability level gamma: stages 2..T draw
// demand multipliers from [1.00 - gamma*t, 1.20 + gamma*t].
std::vector<double> gamma_alpha_low(double gamma, int stage_count);
std::vector<double> gamma_alpha_high(double gamma, int stage_count);

// Sweep description: every (branch count, stage count, gamma, replication)
// combination becomes one cell. Replications of a (M, T) pair share the seed
// derivation across gamma levels, so variability comparisons run on common
// random numbers.
struct ExperimentPlan {
  std::vector<int> branch_counts{2};
  int stage_min = 3;
  int stage_max = 6;
  int stage_limit = 10;  // validation ceiling for stage_max
  std::vector<double> gammas{0.0, 0.005, 0.01};
  int replications = 5;
  std::uint64_t seed = 1;
  // Row filter for the methods table; subset of
  // {MS, ATS, TS-Relax, MS-Relax, ATS-Relax, TS}.
  std::vector<std::string> methods{"MS", "ATS", "TS-Relax", "MS-Relax", "ATS-Relax", "TS"};
  SolverConfig solver;    // defaults: 7200 s, 0.1 % gap
  std::string data_path;  // generation dataset JSON
  int jobs = 1;

  void validate() const;  // throws InvalidConfig
};

ExperimentPlan plan_from_json(const std::string& text);
ExperimentPlan load_plan(const std::string& path);
std::string plan_to_json(const ExperimentPlan& plan);

struct SweepCell {
  int branch_count = 2;
  int stage_count = 3;
  double gamma = 0.0;
  int replication = 0;
  std::uint64_t seed = 0;
};

struct SweepCellResult {
  SweepCell cell;
  bool ok = false;
  std::string error;  // what() of the cell's failure; empty when ok
  GainLossTable table;
  double wall_time_s = 0.0;
};

// Cell list in deterministic plan order (M outer, then T, gamma,
// replication) with derived per-cell seeds.
std::vector<SweepCell> sweep_cells(const ExperimentPlan& plan);

// Runs every cell on a worker pool of width plan.jobs. A failing cell
// records its error and the sweep continues; results are indexed like
// sweep_cells(plan) regardless of completion order, so output files are
// byte-identical across runs and thread counts.
std::vector<SweepCellResult> run_sweep(const ExperimentPlan& plan, const GenExpData& data);

// Per-replication rows (branch_count, stage_count, gamma, replication, v_ts,
// v_ats, rvats_percent, rvats_kind, status) followed by one mean row per
// cell. v_ats carries the TS-Relax objective (kind lower_bound) when the
// exact solve hit its limit.
std::string rvats_csv(const std::vector<SweepCellResult>& results);

// Gain/loss/gap columns per replication plus mean rows, in the gain/loss
// table layout; cells whose solve hit the time limit hold "-". The methods
// list filters columns.
std::string methods_csv(const std::vector<SweepCellResult>& results,
                        const std::vector<std::string>& methods);

// Machine-readable record of a finished sweep: plan echo, dataset
// provenance, per-cell seeds/status/timings, backend.
std::string run_manifest_json(const ExperimentPlan& plan, const GenExpData& data,
                              const std::vector<SweepCellResult>& results);

}  // namespace ats
