#pragma once

#include <stdexcept>

namespace ats {

// Structural violation in a scenario tree (orphan, cycle, bad probabilities).
struct InvalidTree : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Node id outside the tree.
struct UnknownNode : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Stage or revision time outside its admissible range.
struct InvalidRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Malformed configuration object.
struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Payload field absent from tree or dataset.
struct MissingField : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model data does not line up with the tree (sizes, shared vs per-node).
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Supplied x upper bound cannot be a valid big-M for the joint design model.
struct BadBigM : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Cost parameters violate the ordering the closed-form policy requires.
struct InvalidCosts : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Demand family with no quantile evaluator.
struct UnsupportedDistribution : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Requested solver backend is not compiled in.
struct BackendUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Simplex/branch-and-bound could not complete (singular basis, stall).
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wraps NumericalFailure and friends when surfaced through higher layers.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unparseable model or tree file.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ats
