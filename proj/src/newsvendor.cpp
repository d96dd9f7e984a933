#include "ats/newsvendor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ats/errors.hpp"
#include "ats/rng.hpp"

namespace ats {
namespace {

constexpr int kConvolutionDraws = 1'000'000;
// Stream ids for the convolution sampler sit above any scenario index.
constexpr std::uint64_t kConvolutionStream = 0x8000000000000000ull;
constexpr double kQuantileClamp = 1e-12;

double clamp_fractile(double p) {
  return std::min(1.0 - kQuantileClamp, std::max(kQuantileClamp, p));
}

double draw_demand(const NewsvendorConfig& cfg, int t, Rng& rng) {
  switch (cfg.family) {
    case DemandFamily::Normal:
      return rng.normal(cfg.mean[t], cfg.spread[t]);
    case DemandFamily::Uniform:
      return rng.uniform(cfg.mean[t] - cfg.spread[t], cfg.mean[t] + cfg.spread[t]);
  }
  throw UnsupportedDistribution("unknown demand family");
}

void draw_path(const NewsvendorConfig& cfg, std::uint64_t scenario,
               std::vector<double>& out) {
  Rng rng = Rng::substream(cfg.seed, scenario);
  for (int t = 0; t < cfg.horizon; ++t) {
    double d = draw_demand(cfg, t, rng);
    if (cfg.truncate_demand_at_zero) d = std::max(d, 0.0);
    out[t] = d;
  }
}

double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double pos = clamp_fractile(p) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

// Quantiles of demand accumulated over periods start..t, one entry per
// t = start..T placed at index t-1 (earlier entries untouched). Fractiles are
// indexed by t. Normal sums stay normal; other families sample the
// convolution with a fixed per-period substream so every window sees
// identical draws.
void window_quantiles(const NewsvendorConfig& cfg, int start,
                      const std::vector<double>& fractiles,
                      std::vector<double>& out) {
  if (cfg.family == DemandFamily::Normal) {
    double m = 0.0, v = 0.0;
    for (int t = start; t <= cfg.horizon; ++t) {
      m += cfg.mean[t - 1];
      v += cfg.spread[t - 1] * cfg.spread[t - 1];
      out[t - 1] = m + std::sqrt(v) * normal_quantile(clamp_fractile(fractiles[t - 1]));
    }
    return;
  }
  std::vector<double> sums(kConvolutionDraws, 0.0);
  std::vector<double> buf;
  for (int t = start; t <= cfg.horizon; ++t) {
    Rng rng = Rng::substream(cfg.seed, kConvolutionStream + static_cast<std::uint64_t>(t));
    for (double& s : sums) s += draw_demand(cfg, t - 1, rng);
    buf = sums;
    std::sort(buf.begin(), buf.end());
    out[t - 1] = sorted_quantile(buf, fractiles[t - 1]);
  }
}

// Orders realizing a committed cumulative schedule: bring cumulative orders up
// to each target in turn, never below what is already ordered.
std::vector<double> committed_orders(const std::vector<double>& targets) {
  std::vector<double> x(targets.size(), 0.0);
  double cum = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    x[t] = std::max(targets[t] - cum, 0.0);
    cum += x[t];
  }
  return x;
}

double path_cost(const NewsvendorConfig& cfg, const std::vector<double>& orders,
                 const std::vector<double>& demand) {
  double inv = 0.0, cost = 0.0;
  for (int t = 0; t < cfg.horizon; ++t) {
    cost += cfg.order_cost[t] * orders[t];
    inv += orders[t] - demand[t];
    cost += inv >= 0.0 ? cfg.holding_cost[t] * inv : -cfg.backorder_cost[t] * inv;
  }
  return cost;
}

// Runs body(lo, hi) over a partition of [0, n); per-index outputs make the
// result independent of the partition.
template <typename Body>
void parallel_for(long n, int threads, const Body& body) {
  const long workers = std::max<long>(1, std::min<long>(threads, n));
  if (workers == 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const long chunk = (n + workers - 1) / workers;
  for (long w = 0; w < workers; ++w) {
    const long lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string family_name(DemandFamily f) {
  return f == DemandFamily::Normal ? "normal" : "uniform";
}

DemandFamily family_from_name(const std::string& name) {
  if (name == "normal") return DemandFamily::Normal;
  if (name == "uniform") return DemandFamily::Uniform;
  throw UnsupportedDistribution("unknown demand family: " + name);
}

}  // namespace

void NewsvendorConfig::validate() const {
  if (horizon < 1) throw InvalidConfig("newsvendor horizon must be at least 1");
  auto per_period = [&](const std::vector<double>& v, const char* what) {
    if (static_cast<int>(v.size()) != horizon)
      throw DimensionMismatch(std::string(what) + ": expected one entry per period");
    for (double x : v)
      if (!std::isfinite(x))
        throw InvalidConfig(std::string(what) + ": entries must be finite");
  };
  per_period(order_cost, "order_cost");
  per_period(holding_cost, "holding_cost");
  per_period(backorder_cost, "backorder_cost");
  per_period(mean, "mean");
  per_period(spread, "spread");
  for (double w : spread)
    if (w < 0.0) throw InvalidConfig("spread must be nonnegative");
  const double tol = 1e-9;
  for (int t = 0; t < horizon; ++t) {
    if (holding_cost[t] < 0.0 || backorder_cost[t] < 0.0)
      throw InvalidCosts("holding and backorder costs must be nonnegative");
    if (holding_cost[t] + backorder_cost[t] <= 0.0)
      throw InvalidCosts("holding plus backorder cost must be positive");
  }
  for (int t = 0; t + 1 < horizon; ++t) {
    if (order_cost[t + 1] < order_cost[t] - backorder_cost[t] - tol ||
        order_cost[t + 1] > order_cost[t] + holding_cost[t] + tol)
      throw InvalidCosts(
          "order cost changes faster than holding/backorder costs allow; "
          "critical fractiles leave [0, 1]");
  }
  if (backorder_cost[horizon - 1] < order_cost[horizon - 1] - tol)
    throw InvalidCosts("final-period backorder cost must cover the order cost");
  if (revision_time < 1 || revision_time > horizon)
    throw InvalidRange("revision time outside planning horizon");
  if (scenario_count < 1) throw InvalidConfig("scenario_count must be positive");
}

NewsvendorConfig newsvendor_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("newsvendor config: ") + e.what());
  }
  try {
    NewsvendorConfig cfg;
    if (!j.contains("horizon")) throw MissingField("horizon");
    cfg.horizon = j.at("horizon").get<int>();
    auto per_period = [&](const char* key) {
      if (!j.contains(key)) throw MissingField(key);
      const nlohmann::json& v = j.at(key);
      if (v.is_number())
        return std::vector<double>(static_cast<std::size_t>(std::max(cfg.horizon, 0)),
                                   v.get<double>());
      return v.get<std::vector<double>>();
    };
    cfg.order_cost = per_period("order_cost");
    cfg.holding_cost = per_period("holding_cost");
    cfg.backorder_cost = per_period("backorder_cost");
    cfg.mean = per_period("mean");
    cfg.spread = per_period("spread");
    if (j.contains("family")) cfg.family = family_from_name(j.at("family").get<std::string>());
    if (j.contains("revision_time")) cfg.revision_time = j.at("revision_time").get<int>();
    if (j.contains("scenario_count")) cfg.scenario_count = j.at("scenario_count").get<long>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("truncate_demand_at_zero"))
      cfg.truncate_demand_at_zero = j.at("truncate_demand_at_zero").get<bool>();
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("newsvendor config: ") + e.what());
  }
}

NewsvendorConfig load_newsvendor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open newsvendor config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return newsvendor_from_json(buf.str());
}

std::string newsvendor_to_json(const NewsvendorConfig& cfg) {
  nlohmann::json j;
  j["horizon"] = cfg.horizon;
  j["order_cost"] = cfg.order_cost;
  j["holding_cost"] = cfg.holding_cost;
  j["backorder_cost"] = cfg.backorder_cost;
  j["family"] = family_name(cfg.family);
  j["mean"] = cfg.mean;
  j["spread"] = cfg.spread;
  j["revision_time"] = cfg.revision_time;
  j["scenario_count"] = cfg.scenario_count;
  j["seed"] = cfg.seed;
  j["truncate_demand_at_zero"] = cfg.truncate_demand_at_zero;
  return j.dump(2);
}

std::vector<double> PolicyTable::post_targets(double observed_net_inventory) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon - revision_time + 1));
  for (int t = revision_time; t <= horizon; ++t)
    out.push_back(post_window_quantiles[t - 1] - observed_net_inventory);
  return out;
}

PolicyTable solve_policy(const NewsvendorConfig& cfg) {
  cfg.validate();
  const int T = cfg.horizon;
  PolicyTable policy;
  policy.horizon = T;
  policy.revision_time = cfg.revision_time;
  policy.fractiles.resize(T);
  for (int t = 1; t <= T; ++t) {
    const double c_next = t < T ? cfg.order_cost[t] : 0.0;
    policy.fractiles[t - 1] = (-cfg.order_cost[t - 1] + c_next + cfg.backorder_cost[t - 1]) /
                              (cfg.holding_cost[t - 1] + cfg.backorder_cost[t - 1]);
  }
  policy.cumulative_targets.assign(T, 0.0);
  window_quantiles(cfg, 1, policy.fractiles, policy.cumulative_targets);
  policy.post_window_quantiles.assign(T, 0.0);
  if (cfg.revision_time == 1) {
    policy.post_window_quantiles = policy.cumulative_targets;
  } else {
    window_quantiles(cfg, cfg.revision_time, policy.fractiles, policy.post_window_quantiles);
  }
  policy.period_quantiles.assign(T, 0.0);
  for (int t = 1; t <= T; ++t) {
    const double p = clamp_fractile(policy.fractiles[t - 1]);
    if (cfg.family == DemandFamily::Normal) {
      policy.period_quantiles[t - 1] = cfg.mean[t - 1] + cfg.spread[t - 1] * normal_quantile(p);
    } else {
      policy.period_quantiles[t - 1] =
          cfg.mean[t - 1] + cfg.spread[t - 1] * (2.0 * p - 1.0);
    }
  }
  return policy;
}

std::vector<double> order_quantities(const PolicyTable& policy,
                                     const std::vector<double>& observed_demands) {
  const int T = policy.horizon, rev = policy.revision_time;
  if (static_cast<int>(observed_demands.size()) < rev - 1)
    throw DimensionMismatch("need an observed demand for every period before the revision");
  std::vector<double> x(static_cast<std::size_t>(T), 0.0);
  double ordered = 0.0, seen = 0.0, prev = 0.0;
  for (int t = 1; t < rev; ++t) {
    x[t - 1] = std::max(policy.cumulative_targets[t - 1] - prev, 0.0);
    prev = policy.cumulative_targets[t - 1];
    ordered += x[t - 1];
    seen += observed_demands[t - 1];
  }
  const double s = ordered - seen;
  double cum = 0.0;
  for (int t = rev; t <= T; ++t) {
    x[t - 1] = std::max(policy.post_window_quantiles[t - 1] - s - cum, 0.0);
    cum += x[t - 1];
  }
  return x;
}

SimulationResult simulate(const NewsvendorConfig& cfg, PolicyKind kind, int threads) {
  cfg.validate();
  PolicyTable policy;
  std::vector<double> static_orders;
  if (kind == PolicyKind::Static) {
    NewsvendorConfig base = cfg;
    base.revision_time = 1;
    policy = solve_policy(base);
    static_orders = committed_orders(policy.cumulative_targets);
  } else {
    policy = solve_policy(cfg);
  }
  const long n = cfg.scenario_count;
  std::vector<double> costs(static_cast<std::size_t>(n), 0.0);
  parallel_for(n, threads, [&](long lo, long hi) {
    std::vector<double> demand(static_cast<std::size_t>(cfg.horizon), 0.0);
    for (long k = lo; k < hi; ++k) {
      draw_path(cfg, static_cast<std::uint64_t>(k), demand);
      double cost = 0.0;
      switch (kind) {
        case PolicyKind::Static:
          cost = path_cost(cfg, static_orders, demand);
          break;
        case PolicyKind::Adaptive:
          cost = path_cost(cfg, order_quantities(policy, demand), demand);
          break;
        case PolicyKind::Dynamic: {
          double inv = 0.0;
          for (int t = 0; t < cfg.horizon; ++t) {
            const double x = std::max(policy.period_quantiles[t] - inv, 0.0);
            cost += cfg.order_cost[t] * x;
            inv += x - demand[t];
            cost += inv >= 0.0 ? cfg.holding_cost[t] * inv : -cfg.backorder_cost[t] * inv;
          }
          break;
        }
      }
      costs[static_cast<std::size_t>(k)] = cost;
    }
  });
  SimulationResult result;
  result.scenarios = n;
  result.mean_cost = mean_of(costs);
  if (n > 1) {
    double ss = 0.0;
    for (double c : costs) {
      const double d = c - result.mean_cost;
      ss += d * d;
    }
    result.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  return result;
}

double simulated_cost_for_targets(const NewsvendorConfig& cfg,
                                  const std::vector<double>& cumulative_targets) {
  cfg.validate();
  if (static_cast<int>(cumulative_targets.size()) != cfg.horizon)
    throw DimensionMismatch("cumulative_targets: expected one entry per period");
  const std::vector<double> orders = committed_orders(cumulative_targets);
  std::vector<double> demand(static_cast<std::size_t>(cfg.horizon), 0.0);
  double total = 0.0;
  for (long k = 0; k < cfg.scenario_count; ++k) {
    draw_path(cfg, static_cast<std::uint64_t>(k), demand);
    total += path_cost(cfg, orders, demand);
  }
  return total / static_cast<double>(cfg.scenario_count);
}

double simulated_posthorizon_cost(const NewsvendorConfig& cfg, double start_inventory) {
  const PolicyTable policy = solve_policy(cfg);
  const int rev = cfg.revision_time;
  std::vector<double> demand(static_cast<std::size_t>(cfg.horizon), 0.0);
  double total = 0.0;
  for (long k = 0; k < cfg.scenario_count; ++k) {
    draw_path(cfg, static_cast<std::uint64_t>(k), demand);
    double cum = 0.0, inv = start_inventory, cost = 0.0;
    for (int t = rev; t <= cfg.horizon; ++t) {
      const double x =
          std::max(policy.post_window_quantiles[t - 1] - start_inventory - cum, 0.0);
      cum += x;
      cost += cfg.order_cost[t - 1] * x;
      inv += x - demand[t - 1];
      cost += inv >= 0.0 ? cfg.holding_cost[t - 1] * inv : -cfg.backorder_cost[t - 1] * inv;
    }
    total += cost;
  }
  return total / static_cast<double>(cfg.scenario_count);
}

}  // namespace ats
