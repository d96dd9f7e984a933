#include "ats/genexp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "ats/errors.hpp"

namespace ats {

double GenExpData::hours_at(int k, int t) const {
  const std::vector<double>& h = hours.at(k);
  return h.size() == 1 ? h[0] : h.at(t - 1);
}

double GenExpData::acquisition_at(int i, int t) const {
  const GenExpResource& res = resources.at(i);
  return res.acquisition_cost * std::pow(res.acquisition_trend, t - 1);
}

double GenExpData::fixed_om_at(int i, int t) const {
  const GenExpResource& res = resources.at(i);
  return res.fixed_om_cost * std::pow(res.fixed_om_trend, t - 1);
}

double GenExpData::fuel_at(int i, int t) const {
  const GenExpResource& res = resources.at(i);
  return res.fuel_cost * std::pow(res.fuel_trend, t - 1);
}

double GenExpData::generation_at(int i, int t) const {
  const GenExpResource& res = resources.at(i);
  return res.generation_cost * std::pow(res.generation_trend, t - 1);
}

double GenExpData::discount(int t) const { return 1.0 / std::pow(1.0 + interest_rate, t - 1); }

double GenExpData::unit_acquisition_cost(int i, int t, int horizon) const {
  double annuity = 0.0;
  for (int s = t; s <= horizon; ++s) annuity += 1.0 / std::pow(1.0 + interest_rate, s - t);
  return discount(t) * (acquisition_at(i, t) + fixed_om_at(i, t) * annuity) *
         resources.at(i).unit_capacity;
}

void GenExpData::validate() const {
  if (resources.empty()) throw InvalidConfig("generation data: no resources");
  if (subperiods.empty()) throw InvalidConfig("generation data: no subperiods");
  const std::size_t K = subperiods.size();
  if (hours.size() != K)
    throw DimensionMismatch("generation data: hours must hold one entry per subperiod");
  if (root_demand.size() != K)
    throw DimensionMismatch("generation data: root_demand must hold one entry per subperiod");
  for (const GenExpResource& res : resources) {
    const std::string where = "generation data: resource '" + res.name + "': ";
    if (res.name.empty()) throw InvalidConfig("generation data: resource without a name");
    for (double v : {res.initial_units, res.max_units, res.unit_capacity, res.effective_capacity,
                     res.peak_contribution, res.acquisition_cost, res.fixed_om_cost, res.fuel_cost,
                     res.generation_cost, res.acquisition_trend, res.fixed_om_trend, res.fuel_trend,
                     res.generation_trend})
      if (!std::isfinite(v)) throw InvalidConfig(where + "non-finite value");
    if (res.initial_units < 0.0) throw InvalidConfig(where + "initial_units must be >= 0");
    if (res.max_units < res.initial_units)
      throw InvalidConfig(where + "max_units must be >= initial_units");
    if (res.effective_capacity <= 0.0 || res.effective_capacity > res.unit_capacity)
      throw InvalidConfig(where + "effective_capacity must lie in (0, unit_capacity]");
    if (res.peak_contribution <= 0.0 || res.peak_contribution > 1.0)
      throw InvalidConfig(where + "peak_contribution must lie in (0, 1]");
    if (res.acquisition_cost < 0.0 || res.fixed_om_cost < 0.0 || res.fuel_cost < 0.0 ||
        res.generation_cost < 0.0)
      throw InvalidConfig(where + "costs must be >= 0");
    if (res.acquisition_trend <= 0.0 || res.fixed_om_trend <= 0.0 || res.fuel_trend <= 0.0 ||
        res.generation_trend <= 0.0)
      throw InvalidConfig(where + "trend multipliers must be > 0");
    if (res.traditional && res.max_units > 1.2 * res.initial_units + 1e-9)
      throw InvalidConfig(where + "traditional resources may expand at most 20% over initial_units");
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (subperiods[k].empty()) throw InvalidConfig("generation data: subperiod without a name");
    if (hours[k].empty())
      throw DimensionMismatch("generation data: hours of subperiod '" + subperiods[k] +
                              "' must not be empty");
    for (double h : hours[k])
      if (!std::isfinite(h) || h <= 0.0)
        throw InvalidConfig("generation data: hours of subperiod '" + subperiods[k] +
                            "' must be positive");
    if (!std::isfinite(root_demand[k]) || root_demand[k] < 0.0)
      throw InvalidConfig("generation data: root demand of subperiod '" + subperiods[k] +
                          "' must be >= 0");
  }
  if (!std::isfinite(curtailment_penalty) || curtailment_penalty < 0.0)
    throw InvalidConfig("generation data: curtailment_penalty must be >= 0");
  if (!std::isfinite(interest_rate) || interest_rate < 0.0 || interest_rate >= 1.0)
    throw InvalidConfig("generation data: interest_rate must lie in [0, 1)");
}

GenExpData genexp_from_json(const std::string& text) {
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    GenExpData data;
    for (const nlohmann::json& rj : j.at("resources")) {
      GenExpResource res;
      res.name = rj.at("name").get<std::string>();
      res.traditional = rj.value("traditional", false);
      res.initial_units = rj.at("initial_units").get<double>();
      res.max_units = rj.at("max_units").get<double>();
      res.unit_capacity = rj.at("unit_capacity").get<double>();
      res.effective_capacity = rj.at("effective_capacity").get<double>();
      res.peak_contribution = rj.at("peak_contribution").get<double>();
      res.acquisition_cost = rj.at("acquisition_cost").get<double>();
      res.fixed_om_cost = rj.at("fixed_om_cost").get<double>();
      res.fuel_cost = rj.at("fuel_cost").get<double>();
      res.generation_cost = rj.at("generation_cost").get<double>();
      res.acquisition_trend = rj.value("acquisition_trend", 1.0);
      res.fixed_om_trend = rj.value("fixed_om_trend", 1.0);
      res.fuel_trend = rj.value("fuel_trend", 1.0);
      res.generation_trend = rj.value("generation_trend", 1.0);
      data.resources.push_back(std::move(res));
    }
    data.subperiods = j.at("subperiods").get<std::vector<std::string>>();
    for (const nlohmann::json& hj : j.at("hours")) {
      if (hj.is_number())
        data.hours.push_back({hj.get<double>()});
      else
        data.hours.push_back(hj.get<std::vector<double>>());
    }
    data.root_demand = j.at("root_demand").get<std::vector<double>>();
    data.curtailment_penalty = j.at("curtailment_penalty").get<double>();
    data.interest_rate = j.at("interest_rate").get<double>();
    data.provenance = j.value("provenance", std::string());
    data.validate();
    return data;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("generation data JSON: ") + e.what());
  }
}

GenExpData load_genexp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open generation data file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return genexp_from_json(buf.str());
}

std::string genexp_to_json(const GenExpData& data) {
  nlohmann::json j;
  j["resources"] = nlohmann::json::array();
  for (const GenExpResource& res : data.resources) {
    nlohmann::json rj;
    rj["name"] = res.name;
    rj["traditional"] = res.traditional;
    rj["initial_units"] = res.initial_units;
    rj["max_units"] = res.max_units;
    rj["unit_capacity"] = res.unit_capacity;
    rj["effective_capacity"] = res.effective_capacity;
    rj["peak_contribution"] = res.peak_contribution;
    rj["acquisition_cost"] = res.acquisition_cost;
    rj["fixed_om_cost"] = res.fixed_om_cost;
    rj["fuel_cost"] = res.fuel_cost;
    rj["generation_cost"] = res.generation_cost;
    rj["acquisition_trend"] = res.acquisition_trend;
    rj["fixed_om_trend"] = res.fixed_om_trend;
    rj["fuel_trend"] = res.fuel_trend;
    rj["generation_trend"] = res.generation_trend;
    j["resources"].push_back(std::move(rj));
  }
  j["subperiods"] = data.subperiods;
  j["hours"] = data.hours;
  j["root_demand"] = data.root_demand;
  j["curtailment_penalty"] = data.curtailment_penalty;
  j["interest_rate"] = data.interest_rate;
  j["provenance"] = data.provenance;
  return j.dump(2);
}

std::string genexp_demand_field(const std::string& subperiod) {
  return "demand[" + subperiod + "]";
}

TreeGenConfig genexp_tree_config(const GenExpData& data, int branch_count, int stage_count,
                                 const std::vector<double>& alpha_low,
                                 const std::vector<double>& alpha_high, std::uint64_t seed) {
  data.validate();
  TreeGenConfig config;
  config.branch_count = branch_count;
  config.stage_count = stage_count;
  config.alpha_low = alpha_low;
  config.alpha_high = alpha_high;
  for (int k = 0; k < data.subperiod_count(); ++k)
    config.root_demand[genexp_demand_field(data.subperiods[k])] = data.root_demand[k];
  config.seed = seed;
  return config;
}

namespace {

std::string u_name(int i, int k, int n) {
  return "u(" + std::to_string(i) + "," + std::to_string(k) + "," + std::to_string(n) + ")";
}
std::string v_name(int k, int n) {
  return "v(" + std::to_string(k) + "," + std::to_string(n) + ")";
}

// Validates data against the tree and returns the demand payload of every
// subperiod.
std::vector<const std::vector<double>*> checked_demands(const ScenarioTree& tree,
                                                        const GenExpData& data) {
  data.validate();
  const int T = tree.stage_count();
  for (int k = 0; k < data.subperiod_count(); ++k)
    if (data.hours[k].size() != 1 && static_cast<int>(data.hours[k].size()) != T)
      throw DimensionMismatch("generation data: hours of subperiod '" + data.subperiods[k] +
                              "' must be shared or hold one entry per stage");
  std::vector<const std::vector<double>*> demand;
  demand.reserve(data.subperiod_count());
  for (int k = 0; k < data.subperiod_count(); ++k)
    demand.push_back(&tree.payload(genexp_demand_field(data.subperiods[k])));
  return demand;
}

// Generation u(i,k,n) and curtailment v(k,n) variables with their objective
// weights, plus the demand rows dem(k,n). Returns u ids [(i*K + k)*N + n].
std::vector<int> add_operations(ModelInstance& model, const ScenarioTree& tree,
                                const GenExpData& data,
                                const std::vector<const std::vector<double>*>& demand) {
  const int N = tree.size();
  const int I = data.resource_count();
  const int K = data.subperiod_count();
  std::vector<int> u(static_cast<std::size_t>(I) * K * N);
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k)
      for (int n = 0; n < N; ++n) {
        const int t = tree.stage_of(n);
        const int id = model.add_variable(u_name(i, k, n), 0.0, kInfinity, false);
        u[(static_cast<std::size_t>(i) * K + k) * N + n] = id;
        model.set_objective_coeff(id, tree.probability(n) * data.discount(t) *
                                          (data.fuel_at(i, t) + data.generation_at(i, t)) *
                                          data.hours_at(k, t));
      }
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N; ++n) {
      const int t = tree.stage_of(n);
      const int id = model.add_variable(v_name(k, n), 0.0, kInfinity, false);
      model.set_objective_coeff(id, tree.probability(n) * data.discount(t) *
                                        data.curtailment_penalty * data.hours_at(k, t));
      std::vector<LinearTerm> terms;
      for (int i = 0; i < I; ++i)
        terms.push_back({u[(static_cast<std::size_t>(i) * K + k) * N + n],
                         data.resources[i].peak_contribution});
      terms.push_back({id, 1.0});
      model.add_constraint("dem(" + std::to_string(k) + "," + std::to_string(n) + ")",
                           std::move(terms), Sense::GreaterEqual, (*demand[k])[n]);
    }
  return u;
}

// Per-node capacity rows u/m' - sum(x over cover) <= initial_units and, at
// the leaves, the fleet caps initial_units + sum(x over cover) <= max_units.
// cover(i, n) lists the x variable ids installed along the path to n.
void add_structure(ModelInstance& model, const ScenarioTree& tree, const GenExpData& data,
                   const std::vector<int>& u,
                   const std::function<std::vector<int>(int, int)>& cover) {
  const int N = tree.size();
  const int I = data.resource_count();
  const int K = data.subperiod_count();
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < I; ++i) {
      const GenExpResource& res = data.resources[i];
      const std::vector<int> cov = cover(i, n);
      for (int k = 0; k < K; ++k) {
        std::vector<LinearTerm> terms;
        terms.push_back({u[(static_cast<std::size_t>(i) * K + k) * N + n],
                         1.0 / res.effective_capacity});
        for (int id : cov) terms.push_back({id, -1.0});
        model.add_constraint("cap(" + std::to_string(i) + "," + std::to_string(k) + "," +
                                 std::to_string(n) + ")",
                             std::move(terms), Sense::LessEqual, res.initial_units);
      }
      if (tree.stage_of(n) == tree.stage_count()) {
        std::vector<LinearTerm> terms;
        for (int id : cov) terms.push_back({id, 1.0});
        model.add_constraint("lim(" + std::to_string(i) + "," + std::to_string(n) + ")",
                             std::move(terms), Sense::LessEqual,
                             res.max_units - res.initial_units);
      }
    }
}

}  // namespace

ModelInstance build_genexp_multistage(const ScenarioTree& tree, const GenExpData& data) {
  const auto demand = checked_demands(tree, data);
  ModelInstance model;
  model.name = "genexp_multistage";
  const int N = tree.size();
  const int I = data.resource_count();
  const int T = tree.stage_count();
  std::vector<int> x(static_cast<std::size_t>(I) * N);
  for (int i = 0; i < I; ++i)
    for (int n = 0; n < N; ++n) {
      const int id = model.add_variable(ms_x_name(i, n), 0.0, data.resources[i].max_units - data.resources[i].initial_units, true);
      x[static_cast<std::size_t>(i) * N + n] = id;
      model.set_objective_coeff(
          id, tree.probability(n) * data.unit_acquisition_cost(i, tree.stage_of(n), T));
    }
  const std::vector<int> u = add_operations(model, tree, data, demand);
  add_structure(model, tree, data, u, [&](int i, int n) {
    std::vector<int> cov;
    for (int m : tree.path_to_root(n)) cov.push_back(x[static_cast<std::size_t>(i) * N + m]);
    return cov;
  });
  return model;
}

ModelInstance build_genexp_twostage(const ScenarioTree& tree, const GenExpData& data) {
  const auto demand = checked_demands(tree, data);
  ModelInstance model;
  model.name = "genexp_twostage";
  const int I = data.resource_count();
  const int T = tree.stage_count();
  std::vector<int> x(static_cast<std::size_t>(I) * T);
  for (int i = 0; i < I; ++i)
    for (int t = 1; t <= T; ++t) {
      const int id = model.add_variable(ts_x_name(i, t), 0.0, data.resources[i].max_units - data.resources[i].initial_units, true);
      x[static_cast<std::size_t>(i) * T + (t - 1)] = id;
      double coeff = 0.0;
      for (int n : tree.nodes_at_stage(t))
        coeff += tree.probability(n) * data.unit_acquisition_cost(i, t, T);
      model.set_objective_coeff(id, coeff);
    }
  const std::vector<int> u = add_operations(model, tree, data, demand);
  add_structure(model, tree, data, u, [&](int i, int n) {
    std::vector<int> cov;
    for (int t = 1; t <= tree.stage_of(n); ++t)
      cov.push_back(x[static_cast<std::size_t>(i) * T + (t - 1)]);
    return cov;
  });
  return model;
}

ModelInstance build_genexp_fixed(const ScenarioTree& tree, const GenExpData& data,
                                 const RevisionVector& revisions) {
  const auto demand = checked_demands(tree, data);
  validate_revisions(revisions, data.resource_count(), tree.stage_count());
  ModelInstance model;
  model.name = "genexp_adaptive_fixed";
  const int I = data.resource_count();
  const int T = tree.stage_count();
  std::vector<CondensedTree> cond;
  cond.reserve(I);
  for (int i = 0; i < I; ++i) cond.push_back(condense_structure(tree, revisions[i]));
  std::vector<std::vector<int>> x(I);
  for (int i = 0; i < I; ++i) {
    x[i].resize(cond[i].size());
    for (int c = 0; c < cond[i].size(); ++c) {
      const int id = model.add_variable(fixed_x_name(i, c), 0.0, data.resources[i].max_units - data.resources[i].initial_units, true);
      x[i][c] = id;
      double coeff = 0.0;
      for (int m : cond[i].cluster[c])
        coeff += tree.probability(m) * data.unit_acquisition_cost(i, tree.stage_of(m), T);
      model.set_objective_coeff(id, coeff);
    }
  }
  const std::vector<int> u = add_operations(model, tree, data, demand);
  add_structure(model, tree, data, u, [&](int i, int n) {
    std::vector<int> cov;
    for (int c : cond[i].path_to_root(cond[i].cover[n])) cov.push_back(x[i][c]);
    return cov;
  });
  return model;
}

ModelInstance build_genexp_joint(const ScenarioTree& tree, const GenExpData& data) {
  const auto demand = checked_demands(tree, data);
  ModelInstance model;
  model.name = "genexp_adaptive_joint";
  const int N = tree.size();
  const int I = data.resource_count();
  const int T = tree.stage_count();
  // Every node lies on a root-to-leaf path, so the leaf fleet caps bound each
  // acquisition by the headroom max_units - initial_units; that headroom is
  // both the variable bound and the tightest structurally valid tying constant.
  const auto headroom = [&](int i) {
    return data.resources[i].max_units - data.resources[i].initial_units;
  };
  std::vector<int> x(static_cast<std::size_t>(I) * N);
  for (int i = 0; i < I; ++i)
    for (int n = 0; n < N; ++n) {
      const int id = model.add_variable(ms_x_name(i, n), 0.0, headroom(i), true);
      x[static_cast<std::size_t>(i) * N + n] = id;
      model.set_objective_coeff(
          id, tree.probability(n) * data.unit_acquisition_cost(i, tree.stage_of(n), T));
    }
  const std::vector<int> u = add_operations(model, tree, data, demand);
  add_structure(model, tree, data, u, [&](int i, int n) {
    std::vector<int> cov;
    for (int m : tree.path_to_root(n)) cov.push_back(x[static_cast<std::size_t>(i) * N + m]);
    return cov;
  });
  std::vector<int> r(static_cast<std::size_t>(I) * T);
  for (int i = 0; i < I; ++i)
    for (int t = 1; t <= T; ++t)
      r[static_cast<std::size_t>(i) * T + (t - 1)] =
          model.add_variable(r_name(i, t), 0.0, 1.0, true);
  for (int i = 0; i < I; ++i) {
    std::vector<LinearTerm> terms;
    for (int t = 1; t <= T; ++t)
      terms.push_back({r[static_cast<std::size_t>(i) * T + (t - 1)], 1.0});
    model.add_constraint("once(" + std::to_string(i) + ")", std::move(terms), Sense::Equal, 1.0);
  }
  // Tie x across each stage while the revision is still ahead.
  for (int i = 0; i < I; ++i) {
    const double xbar = headroom(i);
    for (int t = 1; t < T; ++t) {
      const auto& stage = tree.nodes_at_stage(t);
      if (stage.size() < 2) continue;
      const int rep = x[static_cast<std::size_t>(i) * N + stage[0]];
      for (std::size_t s = 1; s < stage.size(); ++s) {
        const int other = x[static_cast<std::size_t>(i) * N + stage[s]];
        const std::string tag =
            std::to_string(i) + "," + std::to_string(t) + "," + std::to_string(stage[s]) + ")";
        std::vector<LinearTerm> lo{{rep, 1.0}, {other, -1.0}};
        std::vector<LinearTerm> hi{{rep, 1.0}, {other, -1.0}};
        for (int w = t + 1; w <= T; ++w) {
          const int rv = r[static_cast<std::size_t>(i) * T + (w - 1)];
          lo.push_back({rv, -xbar});
          hi.push_back({rv, xbar});
        }
        model.add_constraint("prelo(" + tag, std::move(lo), Sense::GreaterEqual, -xbar);
        model.add_constraint("prehi(" + tag, std::move(hi), Sense::LessEqual, xbar);
      }
    }
  }
  // Tie x across stage siblings inside each revision-stage subtree.
  for (int i = 0; i < I; ++i) {
    const double xbar = headroom(i);
    for (int t = 1; t < T; ++t) {
      const int rv = r[static_cast<std::size_t>(i) * T + (t - 1)];
      for (int l : tree.nodes_at_stage(t)) {
        const std::vector<int> sub = tree.subtree(l);
        for (int w = t + 1; w <= T; ++w) {
          int rep = -1;
          for (int n : sub) {
            if (tree.stage_of(n) != w) continue;
            if (rep < 0) {
              rep = n;
              continue;
            }
            const int xm = x[static_cast<std::size_t>(i) * N + rep];
            const int xn = x[static_cast<std::size_t>(i) * N + n];
            const std::string tag =
                std::to_string(i) + "," + std::to_string(t) + "," + std::to_string(n) + ")";
            model.add_constraint("postlo(" + tag, {{xm, 1.0}, {xn, -1.0}, {rv, -xbar}},
                                 Sense::GreaterEqual, -xbar);
            model.add_constraint("posthi(" + tag, {{xm, 1.0}, {xn, -1.0}, {rv, xbar}},
                                 Sense::LessEqual, xbar);
          }
        }
      }
    }
  }
  return model;
}

std::vector<std::vector<double>> genexp_implied_demands(const ScenarioTree& tree,
                                                        const GenExpData& data,
                                                        const ModelInstance& model,
                                                        const Solution& solution) {
  data.validate();
  if (!solution.has_values())
    throw InvalidConfig("implied demands need a solution with variable values");
  const int N = tree.size();
  const int I = data.resource_count();
  const int K = data.subperiod_count();
  std::vector<std::vector<double>> delta(I, std::vector<double>(N, 0.0));
  for (int i = 0; i < I; ++i) {
    const GenExpResource& res = data.resources[i];
    for (int n = 0; n < N; ++n) {
      double units = 0.0;
      for (int k = 0; k < K; ++k) {
        const int id = model.find_variable(u_name(i, k, n));
        if (id < 0)
          throw InvalidConfig("implied demands: model lacks generation variable " + u_name(i, k, n));
        units = std::max(units, solution.value(id) / res.effective_capacity);
      }
      delta[i][n] = std::max(0.0, units - res.initial_units);
    }
  }
  return delta;
}

MethodHooks genexp_hooks(const ScenarioTree& tree, const GenExpData& data) {
  MethodHooks hooks;
  hooks.resource_count = data.resource_count();
  hooks.multistage = [&tree, &data] { return build_genexp_multistage(tree, data); };
  hooks.twostage = [&tree, &data] { return build_genexp_twostage(tree, data); };
  hooks.fixed = [&tree, &data](const RevisionVector& revisions) {
    return build_genexp_fixed(tree, data, revisions);
  };
  hooks.joint = [&tree, &data](const std::vector<double>&) {
    return build_genexp_joint(tree, data);
  };
  hooks.joint_bounds = [&data](double) {
    std::vector<double> xu(data.resource_count());
    for (int i = 0; i < data.resource_count(); ++i)
      xu[i] = data.resources[i].max_units - data.resources[i].initial_units;
    return xu;
  };
  hooks.bounds_need_incumbent = false;
  hooks.implied = [&tree, &data](const ModelInstance& model, const Solution& solution) {
    return genexp_implied_demands(tree, data, model, solution);
  };
  hooks.unit_costs = [&tree, &data](int i) {
    const int T = tree.stage_count();
    std::vector<double> cost(tree.size());
    for (int n = 0; n < tree.size(); ++n)
      cost[n] = data.unit_acquisition_cost(i, tree.stage_of(n), T);
    return cost;
  };
  return hooks;
}

HeuristicResult genexp_ts_relax(const ScenarioTree& tree, const GenExpData& data,
                                const SolverConfig& config) {
  return ts_relax_with(tree, genexp_hooks(tree, data), config);
}

HeuristicResult genexp_ms_relax(const ScenarioTree& tree, const GenExpData& data,
                                const SolverConfig& config) {
  return ms_relax_with(tree, genexp_hooks(tree, data), config);
}

HeuristicResult genexp_ats_relax(const ScenarioTree& tree, const GenExpData& data,
                                 const SolverConfig& config) {
  return ats_relax_with(tree, genexp_hooks(tree, data), config);
}

HeuristicResult genexp_exact_ats(const ScenarioTree& tree, const GenExpData& data,
                                 const SolverConfig& config) {
  return exact_ats_with(tree, genexp_hooks(tree, data), config);
}

GainLossTable genexp_gain_loss_table(const ScenarioTree& tree, const GenExpData& data,
                                     const SolverConfig& config) {
  return gain_loss_table_with(tree, genexp_hooks(tree, data), config);
}

namespace {

// Per-node acquisitions of one resource, resolved from whichever variable
// shape the model uses: per node, per condensed node, or per stage.
std::vector<double> node_units(const ScenarioTree& tree, const ModelInstance& model,
                               const Solution& solution, int i, int revision_time) {
  const int N = tree.size();
  std::vector<double> units(N, 0.0);
  if (model.find_variable(ms_x_name(i, 0)) >= 0) {
    for (int n = 0; n < N; ++n) {
      const int id = model.find_variable(ms_x_name(i, n));
      if (id < 0) throw InvalidConfig("expansion plan: model lacks " + ms_x_name(i, n));
      units[n] = solution.value(id);
    }
    return units;
  }
  if (model.find_variable(fixed_x_name(i, 0)) >= 0) {
    const CondensedTree cond = condense_structure(tree, revision_time);
    for (int n = 0; n < N; ++n) {
      const int id = model.find_variable(fixed_x_name(i, cond.cover[n]));
      if (id < 0)
        throw InvalidConfig("expansion plan: model lacks " + fixed_x_name(i, cond.cover[n]));
      units[n] = solution.value(id);
    }
    return units;
  }
  if (model.find_variable(ts_x_name(i, 1)) >= 0) {
    for (int n = 0; n < N; ++n) {
      const int id = model.find_variable(ts_x_name(i, tree.stage_of(n)));
      if (id < 0)
        throw InvalidConfig("expansion plan: model lacks " + ts_x_name(i, tree.stage_of(n)));
      units[n] = solution.value(id);
    }
    return units;
  }
  throw InvalidConfig("expansion plan: model carries no acquisition variables of resource " +
                      std::to_string(i));
}

double rounded(double v) {
  const double r = std::nearbyint(v);
  return std::fabs(v - r) <= 1e-4 ? r : v;
}

}  // namespace

ExpansionPlanSummary extract_expansion_plan(const ScenarioTree& tree, const GenExpData& data,
                                            const ModelInstance& model, const Solution& solution,
                                            const RevisionVector& revisions) {
  const auto demand = checked_demands(tree, data);
  (void)demand;
  validate_revisions(revisions, data.resource_count(), tree.stage_count());
  if (!solution.has_values())
    throw InvalidConfig("expansion plan needs a solution with variable values");
  const int N = tree.size();
  const int I = data.resource_count();
  const int K = data.subperiod_count();
  const int T = tree.stage_count();

  ExpansionPlanSummary plan;
  plan.revisions = revisions;
  std::vector<std::vector<double>> units(I);
  for (int i = 0; i < I; ++i) units[i] = node_units(tree, model, solution, i, revisions[i]);

  for (int n = 0; n < N; ++n) {
    bool report = false;
    for (int i = 0; i < I && !report; ++i)
      report = units[i][n] > 1e-6 || tree.stage_of(n) == revisions[i];
    if (!report) continue;
    ExpansionEntry entry;
    entry.node = n;
    entry.stage = tree.stage_of(n);
    entry.units.resize(I);
    for (int i = 0; i < I; ++i) entry.units[i] = rounded(units[i][n]);
    plan.entries.push_back(std::move(entry));
  }

  for (int i = 0; i < I; ++i)
    for (int n = 0; n < N; ++n)
      plan.acquisition_cost +=
          tree.probability(n) * data.unit_acquisition_cost(i, tree.stage_of(n), T) * units[i][n];
  for (int n = 0; n < N; ++n) {
    const int t = tree.stage_of(n);
    const double disc = data.discount(t);
    for (int k = 0; k < K; ++k) {
      const double hours = data.hours_at(k, t);
      for (int i = 0; i < I; ++i) {
        const int id = model.find_variable(u_name(i, k, n));
        if (id < 0)
          throw InvalidConfig("expansion plan: model lacks generation variable " + u_name(i, k, n));
        plan.generation_cost += tree.probability(n) * disc *
                                (data.fuel_at(i, t) + data.generation_at(i, t)) * hours *
                                solution.value(id);
      }
      const int vid = model.find_variable(v_name(k, n));
      if (vid < 0)
        throw InvalidConfig("expansion plan: model lacks curtailment variable " + v_name(k, n));
      plan.curtailment_cost +=
          tree.probability(n) * disc * data.curtailment_penalty * hours * solution.value(vid);
    }
  }
  plan.objective = plan.acquisition_cost + plan.generation_cost + plan.curtailment_cost;
  return plan;
}

std::string expansion_plan_json(const ExpansionPlanSummary& plan) {
  nlohmann::json j;
  j["revisions"] = plan.revisions;
  j["acquisition_cost"] = plan.acquisition_cost;
  j["generation_cost"] = plan.generation_cost;
  j["curtailment_cost"] = plan.curtailment_cost;
  j["objective"] = plan.objective;
  j["entries"] = nlohmann::json::array();
  for (const ExpansionEntry& entry : plan.entries) {
    nlohmann::json ej;
    ej["node"] = entry.node;
    ej["stage"] = entry.stage;
    ej["units"] = entry.units;
    j["entries"].push_back(std::move(ej));
  }
  return j.dump(2);
}

}  // namespace ats
