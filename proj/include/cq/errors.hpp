#pragma once

#include <stdexcept>

namespace cq {

// Structural problems in inputs: manifests, configs, request parameters.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No level sequence keeps the buffer inside its bounds.
struct PlanInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// brute_force_plan refuses instances beyond its enumeration budget.
struct InstanceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cq
