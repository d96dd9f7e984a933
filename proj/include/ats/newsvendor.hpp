#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ats {

// Multi-period newsvendor with one mid-horizon revision point. Order
// quantities for periods before the revision are committed up front; at the
// revision period the cumulative net inventory is observed and the remaining
// schedule is recomputed once. Static (= revise at period 1, nothing yet
// observed) and fully dynamic (re-target every period) order-up-to policies
// serve as baselines.
enum class DemandFamily { Normal, Uniform };

struct NewsvendorConfig {
  int horizon = 0;                     // number of periods T
  std::vector<double> order_cost;      // c_t, size T; c_{T+1} = 0 by convention
  std::vector<double> holding_cost;    // h_t, charged on end-of-period surplus
  std::vector<double> backorder_cost;  // b_t, charged on end-of-period shortage
  DemandFamily family = DemandFamily::Normal;
  std::vector<double> mean;    // per-period demand mean
  std::vector<double> spread;  // Normal: standard deviation; Uniform: half-width
  int revision_time = 1;       // t* in [1, T]
  long scenario_count = 1000;  // Monte Carlo sample size
  std::uint64_t seed = 1;
  // Clamp sampled demands at zero during simulation. Target computation always
  // uses the untruncated family; with the default parameters the negative mass
  // is negligible.
  bool truncate_demand_at_zero = false;

  // Throws InvalidConfig on shape/finiteness problems, InvalidRange on a bad
  // revision time, and InvalidCosts when the cost structure admits no interior
  // critical fractile: required are c_t - b_t <= c_{t+1} <= c_t + h_t for
  // t < T, b_T >= c_T, and h_t + b_t > 0.
  void validate() const;
};

NewsvendorConfig newsvendor_from_json(const std::string& text);
NewsvendorConfig load_newsvendor(const std::string& path);
std::string newsvendor_to_json(const NewsvendorConfig& config);

// Order-up-to targets solving the one-revision problem. cumulative_targets[t-1]
// is the optimal cumulative order quantity through period t when committing at
// period 1; the committed schedule uses entries before the revision period.
// post_window_quantiles[t-1] (t >= t*) is the critical quantile of demand
// accumulated over periods t*..t; subtracting the observed net inventory gives
// the revised cumulative target counted from t*. period_quantiles[t-1] is the
// single-period critical quantile used by the dynamic baseline.
struct PolicyTable {
  int horizon = 0;
  int revision_time = 1;
  std::vector<double> fractiles;
  std::vector<double> cumulative_targets;
  std::vector<double> post_window_quantiles;  // zero before revision_time
  std::vector<double> period_quantiles;

  // Revised cumulative targets (counted from t*) after observing net inventory
  // s at the revision period: entry k is the target through period t*+k.
  std::vector<double> post_targets(double observed_net_inventory) const;
};

// Computes critical fractiles (-c_t + c_{t+1} + b_t)/(h_t + b_t) and inverts
// the accumulated-demand distribution at them. Normal partial sums are normal,
// so those quantiles are closed form; other families use an empirical quantile
// over one million seeded draws, deterministic in config.seed.
PolicyTable solve_policy(const NewsvendorConfig& config);

// Per-period nonnegative orders implied by the policy. Pre-revision orders are
// successive target differences clipped at zero and ignore observations;
// post-revision orders follow the revised targets given the net inventory at
// t*, subtracting what has already been ordered since the revision. Only
// demands for periods before t* are read.
std::vector<double> order_quantities(const PolicyTable& policy,
                                     const std::vector<double>& observed_demands);

enum class PolicyKind { Static, Adaptive, Dynamic };

struct SimulationResult {
  double mean_cost = 0.0;
  double std_error = 0.0;
  long scenarios = 0;
};

// Monte Carlo estimate of the expected policy cost
//   sum_t c_t x_t + h_t max(I_t, 0) + b_t max(-I_t, 0),  I_t = sum_{t'<=t} (x_t' - d_t').
// Demand paths use one RNG substream per scenario derived from config.seed, so
// all policy kinds (and repeated calls) see identical scenarios and results do
// not depend on the thread count. Static ignores revision_time; Adaptive
// revises once at config.revision_time; Dynamic re-targets every period from
// current inventory.
SimulationResult simulate(const NewsvendorConfig& config, PolicyKind kind,
                          int threads = 1);

// Mean simulated cost of the committed schedule defined by arbitrary
// cumulative targets (no revision), on the same scenarios as simulate(). Used
// to probe flatness of the objective around the computed targets.
double simulated_cost_for_targets(const NewsvendorConfig& config,
                                  const std::vector<double>& cumulative_targets);

// Mean simulated cost of periods t*..T under the revised schedule when the net
// inventory entering t* equals start_inventory. Its slope in start_inventory
// is -c_{t*} wherever the revision-period order stays positive.
double simulated_posthorizon_cost(const NewsvendorConfig& config,
                                  double start_inventory);

}  // namespace ats
