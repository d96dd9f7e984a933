#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ats/bounds.hpp"
#include "ats/errors.hpp"
#include "ats/experiments.hpp"
#include "ats/formulations.hpp"
#include "ats/genexp.hpp"
#include "ats/heuristics.hpp"
#include "ats/lp_format.hpp"
#include "ats/model.hpp"
#include "ats/newsvendor.hpp"
#include "ats/scenario_tree.hpp"
#include "ats/tree_gen.hpp"
#include "ats/tree_io.hpp"

namespace {

using namespace ats;

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ParseError("failed writing '" + path + "'");
}

// "2,3,5" -> {2,3,5}
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const std::string item = text.substr(pos, next - pos);
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InvalidConfig("cannot parse integer list entry '" + item + "'");
    }
    pos = next + 1;
  }
  return out;
}

// "1..5" -> {1,...,5}; otherwise a comma list.
std::vector<int> parse_int_range(const std::string& text) {
  const std::size_t dots = text.find("..");
  if (dots == std::string::npos) return parse_int_list(text);
  const std::vector<int> lo = parse_int_list(text.substr(0, dots));
  const std::vector<int> hi = parse_int_list(text.substr(dots + 2));
  if (lo.size() != 1 || hi.size() != 1 || lo[0] > hi[0])
    throw InvalidConfig("cannot parse range '" + text + "'");
  std::vector<int> out;
  for (int v = lo[0]; v <= hi[0]; ++v) out.push_back(v);
  return out;
}

nlohmann::json heuristic_json(const HeuristicResult& result) {
  nlohmann::json j;
  j["revisions"] = result.revisions;
  j["objective"] = result.objective;
  j["status"] = to_string(result.status);
  j["lower_bound"] =
      result.lower_bound ? nlohmann::json(*result.lower_bound) : nlohmann::json();
  j["gap_percent"] =
      result.gap_percent ? nlohmann::json(*result.gap_percent) : nlohmann::json();
  j["guarantee"] = result.guarantee ? nlohmann::json(*result.guarantee) : nlohmann::json();
  j["wall_time_s"] = result.wall_time_s;
  return j;
}

struct TreeGenerateArgs {
  int branches = 2;
  int stages = 3;
  std::uint64_t seed = 0;
  std::vector<double> alpha_low{1.0};
  std::vector<double> alpha_high{1.2};
  std::vector<std::string> roots;
  bool share_draw = false;
  std::string out = "tree.json";
};

struct SolveArgs {
  std::string model_path;
  SolverConfig config;
  bool relax_only = false;
  std::string out;
};

struct CompileArgs {
  std::string formulation;
  std::string tree_path;
  std::string data_path;
  std::string revisions;
  std::string x_upper;
  std::string shape = "joint";
  std::string out = "model.lp";
  SolverConfig config;
};

struct BoundsArgs {
  std::string tree_path;
  std::string a_field = "a";
  std::string delta_field = "delta";
  std::string report;
};

struct HeuristicArgs {
  std::string method;
  std::string tree_path;
  std::string data_path;
  std::string report;
  bool genexp = false;
  SolverConfig config;
};

struct NewsvendorArgs {
  std::string config_path;
  std::string policies = "static,adaptive,dynamic";
  std::string revisions;
  long scenarios = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
};

struct SweepArgs {
  std::string plan_path;
  std::string out_dir = "results";
  std::string data_path;
  int jobs = 0;
};

int run_tree_generate(const TreeGenerateArgs& args) {
  TreeGenConfig config;
  config.branch_count = args.branches;
  config.stage_count = args.stages;
  config.seed = args.seed;
  config.alpha_low = args.alpha_low;
  config.alpha_high = args.alpha_high;
  config.share_draw_per_branch = args.share_draw;
  std::vector<std::string> roots = args.roots;
  if (roots.empty()) roots.push_back("demand=1");
  for (const std::string& spec : roots) {
    const std::size_t eq = spec.rfind('=');
    if (eq == std::string::npos || eq == 0)
      throw InvalidConfig("--root expects field=value, got '" + spec + "'");
    config.root_demand[spec.substr(0, eq)] = std::stod(spec.substr(eq + 1));
  }
  const ScenarioTree tree = generate_tree(config);
  save_tree(tree, args.out);
  std::cout << "wrote " << args.out << ": " << tree.size() << " nodes, "
            << tree.stage_count() << " stages, " << tree.leaves().size() << " scenarios\n";
  return 0;
}

int run_tree_validate(const std::string& path) {
  const ScenarioTree tree = load_tree(path);
  std::cout << path << ": " << tree.size() << " nodes, " << tree.stage_count()
            << " stages, " << tree.leaves().size() << " scenarios";
  for (const auto& [field, values] : tree.payloads()) std::cout << ", payload " << field;
  std::cout << " -- OK\n";
  return 0;
}

int run_solve(const SolveArgs& args) {
  const ModelInstance model = load_lp(args.model_path);
  Solution solution;
  if (args.relax_only) {
    ModelInstance relaxed = model;
    for (int j = 0; j < relaxed.variable_count(); ++j) relaxed.variable(j).integral = false;
    solution = solve(relaxed, args.config);
  } else {
    solution = solve(model, args.config);
  }
  std::cout << "status      " << to_string(solution.status) << "\n";
  if (solution.has_values()) std::cout << "objective   " << fmt10(solution.objective) << "\n";
  std::cout << "best bound  " << fmt10(solution.best_bound) << "\n";
  if (solution.has_values() && solution.rel_gap == solution.rel_gap)
    std::cout << "rel gap     " << fmt10(solution.rel_gap) << "\n";
  std::cout << "nodes       " << solution.nodes << "\n"
            << "iterations  " << solution.iterations << "\n"
            << "wall time   " << fmt10(solution.wall_time_s) << " s\n";
  if (!args.out.empty()) {
    nlohmann::json j;
    j["status"] = to_string(solution.status);
    j["objective"] = solution.objective;
    j["best_bound"] = solution.best_bound;
    j["rel_gap"] = solution.rel_gap;
    j["nodes"] = solution.nodes;
    j["iterations"] = solution.iterations;
    j["wall_time_s"] = solution.wall_time_s;
    j["values"] = nlohmann::json::object();
    for (int k = 0; k < model.variable_count() && solution.has_values(); ++k)
      j["values"][model.variable(k).name] = solution.values[k];
    write_file(args.out, j.dump(2) + "\n");
    std::cout << "wrote " << args.out << "\n";
  }
  return solution.status == SolveStatus::Infeasible || solution.status == SolveStatus::Unbounded
             ? 1
             : 0;
}

int run_compile(const CompileArgs& args) {
  const ScenarioTree tree = load_tree(args.tree_path);
  ModelInstance model;
  if (args.formulation == "genexp") {
    const GenExpData data = load_genexp(args.data_path);
    std::string shape = args.shape;
    if (!args.revisions.empty() && shape == "joint") shape = "fixed";
    if (shape == "ms") {
      model = build_genexp_multistage(tree, data);
    } else if (shape == "ts") {
      model = build_genexp_twostage(tree, data);
    } else if (shape == "fixed") {
      if (args.revisions.empty())
        throw InvalidConfig("genexp fixed shape needs --revisions");
      model = build_genexp_fixed(tree, data, parse_int_list(args.revisions));
    } else if (shape == "joint") {
      model = build_genexp_joint(tree, data);
    } else {
      throw InvalidConfig("unknown genexp shape '" + shape + "'");
    }
  } else {
    const CapacityExpansionData data = load_capex(args.data_path);
    if (args.formulation == "ms") {
      model = build_multistage(tree, data);
    } else if (args.formulation == "ts") {
      model = build_twostage(tree, data);
    } else if (args.formulation == "ats-fixed") {
      if (args.revisions.empty()) throw InvalidConfig("ats-fixed needs --revisions");
      model = build_adaptive_fixed(tree, data, parse_int_list(args.revisions));
    } else if (args.formulation == "ats-joint") {
      std::vector<double> x_upper;
      if (!args.x_upper.empty()) {
        for (int v : parse_int_list(args.x_upper)) x_upper.push_back(v);
      } else {
        // No bound supplied: derive one from the static optimum, which every
        // adaptive design improves on.
        const Solution ts = solve(build_twostage(tree, data), args.config);
        if (!ts.has_values()) throw SolverFailure("two-stage solve found no design");
        x_upper = x_upper_from_objective_bound(tree, data, ts.objective);
        std::cout << "derived acquisition bounds from two-stage optimum "
                  << fmt10(ts.objective) << "\n";
      }
      model = build_adaptive_joint(tree, data, x_upper);
    } else {
      throw InvalidConfig("unknown formulation '" + args.formulation + "'");
    }
  }
  save_lp(model, args.out);
  int integral = 0;
  for (const Variable& v : model.variables()) integral += v.integral ? 1 : 0;
  std::cout << "wrote " << args.out << ": " << model.variable_count() << " variables ("
            << integral << " integer), " << model.constraints().size() << " rows\n";
  return 0;
}

int run_bounds(const BoundsArgs& args) {
  const ScenarioTree tree = load_tree(args.tree_path);
  const BoundsReport report = compute_bounds_report(tree, args.a_field, args.delta_field);
  const std::string csv = bounds_report_csv(report);
  if (args.report.empty()) {
    std::cout << csv;
  } else {
    write_file(args.report, csv);
    std::cout << "wrote " << args.report << "\n";
  }
  std::cout << "revision by demand: t* = "
            << select_revision_by_demand(tree, args.delta_field)
            << ", by cost: t* = " << select_revision_by_cost(tree, args.a_field) << "\n";
  return 0;
}

int run_heuristic(const HeuristicArgs& args) {
  const ScenarioTree tree = load_tree(args.tree_path);
  HeuristicResult result;
  if (args.genexp) {
    const GenExpData data = load_genexp(args.data_path);
    if (args.method == "ts-relax")
      result = genexp_ts_relax(tree, data, args.config);
    else if (args.method == "ms-relax")
      result = genexp_ms_relax(tree, data, args.config);
    else if (args.method == "ats-relax")
      result = genexp_ats_relax(tree, data, args.config);
    else
      result = genexp_exact_ats(tree, data, args.config);
  } else {
    const CapacityExpansionData data = load_capex(args.data_path);
    if (args.method == "ts-relax")
      result = ts_relax(tree, data, args.config);
    else if (args.method == "ms-relax")
      result = ms_relax(tree, data, args.config);
    else if (args.method == "ats-relax")
      result = ats_relax(tree, data, args.config);
    else
      result = exact_ats(tree, data, args.config);
  }
  const std::string text = heuristic_json(result).dump(2) + "\n";
  if (args.report.empty()) {
    std::cout << text;
  } else {
    write_file(args.report, text);
    std::cout << "wrote " << args.report << "\n";
  }
  return 0;
}

int run_newsvendor(const NewsvendorArgs& args) {
  NewsvendorConfig config = load_newsvendor(args.config_path);
  if (args.scenarios > 0) config.scenario_count = args.scenarios;
  if (args.seed_given) config.seed = args.seed;
  config.validate();

  bool want_static = false, want_adaptive = false, want_dynamic = false;
  std::size_t pos = 0;
  while (pos <= args.policies.size()) {
    std::size_t next = args.policies.find(',', pos);
    if (next == std::string::npos) next = args.policies.size();
    const std::string name = args.policies.substr(pos, next - pos);
    if (name == "static")
      want_static = true;
    else if (name == "adaptive")
      want_adaptive = true;
    else if (name == "dynamic")
      want_dynamic = true;
    else if (!name.empty())
      throw InvalidConfig("unknown policy '" + name + "'");
    pos = next + 1;
  }
  if (!want_static && !want_adaptive && !want_dynamic)
    throw InvalidConfig("--policies selected nothing");

  std::vector<int> revisions;
  if (args.revisions.empty())
    for (int t = 1; t <= config.horizon; ++t) revisions.push_back(t);
  else
    revisions = parse_int_range(args.revisions);
  for (int t : revisions)
    if (t < 1 || t > config.horizon)
      throw InvalidRange("revision time " + std::to_string(t) + " outside 1.." +
                         std::to_string(config.horizon));

  // Static and dynamic costs do not move with the revision time; they are the
  // flat reference lines of the curve.
  SimulationResult stat, dyn;
  if (want_static) stat = simulate(config, PolicyKind::Static);
  if (want_dynamic) dyn = simulate(config, PolicyKind::Dynamic);

  std::ostringstream csv;
  csv << "revision_time";
  if (want_static) csv << ",static_mean,static_se";
  if (want_adaptive) csv << ",adaptive_mean,adaptive_se";
  if (want_dynamic) csv << ",dynamic_mean,dynamic_se";
  csv << "\n";
  int best_t = revisions.front();
  double best_cost = std::numeric_limits<double>::infinity();
  for (int t : revisions) {
    csv << t;
    if (want_static) csv << "," << fmt10(stat.mean_cost) << "," << fmt10(stat.std_error);
    if (want_adaptive) {
      NewsvendorConfig at = config;
      at.revision_time = t;
      const SimulationResult r = simulate(at, PolicyKind::Adaptive);
      csv << "," << fmt10(r.mean_cost) << "," << fmt10(r.std_error);
      if (r.mean_cost < best_cost) {
        best_cost = r.mean_cost;
        best_t = t;
      }
    }
    if (want_dynamic) csv << "," << fmt10(dyn.mean_cost) << "," << fmt10(dyn.std_error);
    csv << "\n";
  }
  if (args.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(args.out, csv.str());
    std::cout << "wrote " << args.out << "\n";
  }
  if (want_adaptive)
    std::cout << "best adaptive revision: t* = " << best_t << " (mean cost "
              << fmt10(best_cost) << ")\n";
  return 0;
}

int run_genexp_sweep(const SweepArgs& args) {
  ExperimentPlan plan = load_plan(args.plan_path);
  if (args.jobs > 0) plan.jobs = args.jobs;
  if (!args.data_path.empty()) plan.data_path = args.data_path;
  if (plan.data_path.empty())
    throw InvalidConfig("plan carries no data_path; pass --data");
  const GenExpData data = load_genexp(plan.data_path);

  std::cout << "running " << sweep_cells(plan).size() << " cells on " << plan.jobs
            << " worker(s)\n";
  const std::vector<SweepCellResult> results = run_sweep(plan, data);

  namespace fs = std::filesystem;
  fs::create_directories(fs::path(args.out_dir) / "plans");
  const std::string rvats_path = (fs::path(args.out_dir) / "rvats.csv").string();
  const std::string methods_path = (fs::path(args.out_dir) / "methods.csv").string();
  const std::string manifest_path = (fs::path(args.out_dir) / "manifest.json").string();
  write_file(rvats_path, rvats_csv(results));
  write_file(methods_path, methods_csv(results, plan.methods));
  write_file(manifest_path, run_manifest_json(plan, data, results) + "\n");

  // Readable expansion plan per finished cell: re-solve the fixed design at
  // the revision times the sweep reported, which is fast and reproducible.
  int plans_written = 0, failed = 0;
  for (const SweepCellResult& r : results) {
    if (!r.ok) {
      ++failed;
      std::cerr << "cell M=" << r.cell.branch_count << " T=" << r.cell.stage_count
                << " gamma=" << fmt10(r.cell.gamma) << " rep=" << r.cell.replication
                << " failed: " << r.error << "\n";
      continue;
    }
    const ScenarioTree tree = generate_tree(genexp_tree_config(
        data, r.cell.branch_count, r.cell.stage_count,
        gamma_alpha_low(r.cell.gamma, r.cell.stage_count),
        gamma_alpha_high(r.cell.gamma, r.cell.stage_count), r.cell.seed));
    const ModelInstance fixed = build_genexp_fixed(tree, data, r.table.ats_revisions);
    const Solution solution = solve(fixed, plan.solver);
    if (!solution.has_values()) {
      ++failed;
      continue;
    }
    const ExpansionPlanSummary summary =
        extract_expansion_plan(tree, data, fixed, solution, r.table.ats_revisions);
    const std::string name = "m" + std::to_string(r.cell.branch_count) + "_t" +
                             std::to_string(r.cell.stage_count) + "_g" + fmt10(r.cell.gamma) +
                             "_r" + std::to_string(r.cell.replication) + ".json";
    write_file((fs::path(args.out_dir) / "plans" / name).string(),
               expansion_plan_json(summary) + "\n");
    ++plans_written;
  }
  std::cout << "wrote " << rvats_path << ", " << methods_path << ", " << manifest_path << ", "
            << plans_written << " expansion plan(s)\n";
  if (failed > 0) std::cout << failed << " cell(s) failed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive two-stage stochastic programming toolkit"};
  app.require_subcommand(1);

  auto tree_gen_args = std::make_shared<TreeGenerateArgs>();
  auto tree_validate_path = std::make_shared<std::string>();
  auto solve_args = std::make_shared<SolveArgs>();
  auto compile_args = std::make_shared<CompileArgs>();
  auto bounds_args = std::make_shared<BoundsArgs>();
  auto heuristic_args = std::make_shared<HeuristicArgs>();
  auto newsvendor_args = std::make_shared<NewsvendorArgs>();
  auto sweep_args = std::make_shared<SweepArgs>();
  int exit_code = 0;

  CLI::App* tree = app.add_subcommand("tree", "scenario tree utilities");
  tree->require_subcommand(1);
  CLI::App* tree_generate =
      tree->add_subcommand("generate", "write a random balanced scenario tree");
  tree_generate->add_option("--branches", tree_gen_args->branches, "children per node");
  tree_generate->add_option("--stages", tree_gen_args->stages, "number of stages");
  tree_generate->add_option("--seed", tree_gen_args->seed, "RNG seed");
  tree_generate->add_option("--alpha-low", tree_gen_args->alpha_low,
                            "lower demand multipliers, one value or one per stage 2..T");
  tree_generate->add_option("--alpha-high", tree_gen_args->alpha_high,
                            "upper demand multipliers");
  tree_generate->add_option("--root", tree_gen_args->roots,
                            "root payload as field=value (repeatable)");
  tree_generate->add_flag("--share-draw", tree_gen_args->share_draw,
                          "share one multiplier draw per branch order");
  tree_generate->add_option("-o,--output", tree_gen_args->out, "output tree JSON");
  tree_generate->callback([=, &exit_code] { exit_code = run_tree_generate(*tree_gen_args); });

  CLI::App* tree_validate = tree->add_subcommand("validate", "check a tree JSON file");
  tree_validate->add_option("tree", *tree_validate_path, "tree JSON path")->required();
  tree_validate->callback([=, &exit_code] { exit_code = run_tree_validate(*tree_validate_path); });

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve a model file");
  solve_cmd->add_option("model", solve_args->model_path, "LP-format model path")->required();
  solve_cmd->add_option("--gap", solve_args->config.gap_tol, "relative MIP gap tolerance");
  solve_cmd->add_option("--timelimit", solve_args->config.time_limit_s, "time limit, seconds");
  solve_cmd->add_option("--node-limit", solve_args->config.node_limit, "branch-and-bound node cap");
  solve_cmd->add_flag("--relax", solve_args->relax_only, "solve the LP relaxation only");
  solve_cmd->add_option("-o,--output", solve_args->out, "write solution JSON here");
  solve_cmd->callback([=, &exit_code] { exit_code = run_solve(*solve_args); });

  CLI::App* compile_cmd = app.add_subcommand("compile", "build a model file from tree + data");
  compile_cmd
      ->add_option("--formulation", compile_args->formulation,
                   "one of ms, ts, ats-fixed, ats-joint, genexp")
      ->required()
      ->check(CLI::IsMember({"ms", "ts", "ats-fixed", "ats-joint", "genexp"}));
  compile_cmd->add_option("--tree", compile_args->tree_path, "tree JSON")->required();
  compile_cmd->add_option("--data", compile_args->data_path, "problem data JSON")->required();
  compile_cmd->add_option("--revisions", compile_args->revisions,
                          "comma-separated revision stage per resource");
  compile_cmd->add_option("--x-upper", compile_args->x_upper,
                          "per-resource acquisition caps for ats-joint");
  compile_cmd->add_option("--shape", compile_args->shape,
                          "genexp family shape: ms, ts, fixed or joint");
  compile_cmd->add_option("-o,--output", compile_args->out, "output model path");
  compile_cmd->callback([=, &exit_code] { exit_code = run_compile(*compile_args); });

  CLI::App* bounds_cmd =
      app.add_subcommand("bounds", "analytic revision-time gap intervals for one resource");
  bounds_cmd->add_option("--tree", bounds_args->tree_path, "tree JSON")->required();
  bounds_cmd->add_option("--a", bounds_args->a_field, "cost payload field");
  bounds_cmd->add_option("--delta", bounds_args->delta_field, "demand payload field");
  bounds_cmd->add_option("--report", bounds_args->report, "write the CSV here");
  bounds_cmd->callback([=, &exit_code] { exit_code = run_bounds(*bounds_args); });

  CLI::App* heuristic_cmd =
      app.add_subcommand("heuristic", "revision-time selection methods and the exact solve");
  heuristic_cmd
      ->add_option("--method", heuristic_args->method,
                   "one of ts-relax, ms-relax, ats-relax, exact")
      ->required()
      ->check(CLI::IsMember({"ts-relax", "ms-relax", "ats-relax", "exact"}));
  heuristic_cmd->add_option("--tree", heuristic_args->tree_path, "tree JSON")->required();
  heuristic_cmd->add_option("--data", heuristic_args->data_path, "problem data JSON")->required();
  heuristic_cmd->add_flag("--genexp", heuristic_args->genexp,
                          "treat --data as a generation dataset");
  heuristic_cmd->add_option("--gap", heuristic_args->config.gap_tol, "relative MIP gap tolerance");
  heuristic_cmd->add_option("--timelimit", heuristic_args->config.time_limit_s,
                            "time limit per solve, seconds");
  heuristic_cmd->add_option("--report", heuristic_args->report, "write result JSON here");
  heuristic_cmd->callback([=, &exit_code] { exit_code = run_heuristic(*heuristic_args); });

  CLI::App* newsvendor_cmd =
      app.add_subcommand("newsvendor", "simulate order-up-to policies over revision times");
  newsvendor_cmd->add_option("--config", newsvendor_args->config_path, "problem JSON")->required();
  newsvendor_cmd->add_option("--policies", newsvendor_args->policies,
                             "comma list from static, adaptive, dynamic");
  newsvendor_cmd->add_option("--revisions", newsvendor_args->revisions,
                             "revision times to sweep, e.g. 1..8 or 2,4,6");
  newsvendor_cmd->add_option("--scenarios", newsvendor_args->scenarios,
                             "Monte Carlo sample size override");
  newsvendor_cmd->add_option("--seed", newsvendor_args->seed, "RNG seed override");
  newsvendor_cmd->add_option("-o,--output", newsvendor_args->out, "write curve CSV here");
  newsvendor_cmd->callback([=, &exit_code] {
    newsvendor_args->seed_given = newsvendor_cmd->count("--seed") > 0;
    exit_code = run_newsvendor(*newsvendor_args);
  });

  CLI::App* genexp_cmd = app.add_subcommand("genexp", "generation expansion experiments");
  genexp_cmd->require_subcommand(1);
  CLI::App* sweep_cmd = genexp_cmd->add_subcommand("sweep", "run an experiment plan");
  sweep_cmd->add_option("--plan", sweep_args->plan_path, "experiment plan JSON")->required();
  sweep_cmd->add_option("-o,--output", sweep_args->out_dir, "output directory");
  sweep_cmd->add_option("--data", sweep_args->data_path, "generation dataset override");
  sweep_cmd->add_option("--jobs", sweep_args->jobs, "worker threads override");
  sweep_cmd->callback([=, &exit_code] { exit_code = run_genexp_sweep(*sweep_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
