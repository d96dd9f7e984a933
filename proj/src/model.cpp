#include "ats/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ats/errors.hpp"

namespace ats {

int ModelInstance::add_variable(std::string name, double lower, double upper, bool integral) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper)
    throw InvalidConfig("variable '" + name + "': bounds must satisfy lower <= upper");
  variables_.push_back({std::move(name), lower, upper, integral});
  objective_.push_back(0.0);
  return static_cast<int>(variables_.size()) - 1;
}

void ModelInstance::add_constraint(std::string name, std::vector<LinearTerm> terms, Sense sense,
                                   double rhs) {
  // Merge duplicate variable references so downstream code sees clean rows.
  std::map<int, double> merged;
  for (const LinearTerm& t : terms) {
    if (t.var < 0 || t.var >= variable_count())
      throw DimensionMismatch("constraint '" + name + "' references unknown variable index " +
                              std::to_string(t.var));
    merged[t.var] += t.coeff;
  }
  std::vector<LinearTerm> clean;
  clean.reserve(merged.size());
  for (const auto& [var, coeff] : merged)
    if (coeff != 0.0) clean.push_back({var, coeff});
  constraints_.push_back({std::move(name), std::move(clean), sense, rhs});
}

void ModelInstance::set_objective_coeff(int var, double coeff) {
  if (var < 0 || var >= variable_count())
    throw DimensionMismatch("objective references unknown variable index " + std::to_string(var));
  objective_[var] = coeff;
}

void ModelInstance::add_objective_coeff(int var, double coeff) {
  if (var < 0 || var >= variable_count())
    throw DimensionMismatch("objective references unknown variable index " + std::to_string(var));
  objective_[var] += coeff;
}

int ModelInstance::find_variable(const std::string& name) const {
  for (int i = 0; i < variable_count(); ++i)
    if (variables_[i].name == name) return i;
  return -1;
}

void ModelInstance::validate() const {
  for (const Variable& v : variables_)
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
      throw InvalidConfig("variable '" + v.name + "': bounds must satisfy lower <= upper");
  for (const Constraint& c : constraints_) {
    if (!std::isfinite(c.rhs))
      throw InvalidConfig("constraint '" + c.name + "': rhs must be finite");
    for (const LinearTerm& t : c.terms) {
      if (t.var < 0 || t.var >= variable_count())
        throw DimensionMismatch("constraint '" + c.name + "' references unknown variable");
      if (!std::isfinite(t.coeff))
        throw InvalidConfig("constraint '" + c.name + "': non-finite coefficient");
    }
  }
}

ModelInstance relax(const ModelInstance& model) {
  ModelInstance lp = model;
  for (int i = 0; i < lp.variable_count(); ++i) lp.variable(i).integral = false;
  return lp;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::TimeLimit: return "TimeLimit";
  }
  return "Unknown";
}

}  // namespace ats
