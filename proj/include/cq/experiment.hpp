#pragma once

#include <iosfwd>
#include <utility>

#include "cq/sim.hpp"

namespace cq {

// A scenario file: ladder source, trace source, controllers to compare,
// objective, config overrides, optional parameter sweep.
struct ExperimentSpec {
  std::string scenario = "scenario";
  std::string output_dir;

  std::string ladder_manifest;  // when set, wins over the synthetic params
  uint64_t ladder_seed = 1;
  int ladder_segments = 0;
  int ladder_levels = 0;
  double ladder_tau = 2;
  std::vector<double> ladder_bitrates_bps;
  SynthProfile profile;

  std::string trace_file;
  std::string trace_inline;

  std::vector<ControllerKind> controllers;
  Objective objective;
  std::string config_file;  // key-value controller config, applied per kind
  std::vector<std::pair<std::string, double>> overrides;  // Table-1 key names
  std::vector<int> client_starts;                         // default: one client at 0
  SimOptions sim;

  std::string sweep_param;  // "BL" or "H"
  std::vector<double> sweep_values;

  void validate() const;
};

// "maxmin", "alpha:<a>", or "alpha:<a>,delta:<d>".
Objective parse_objective(const std::string& text);

ExperimentSpec parse_experiment_spec(const std::string& path);

// Runs the scenario and writes one trace and one summary CSV per
// (controller, client) plus a cross-controller comparison table; in sweep
// mode writes sweep.csv instead. Partial outputs are removed on error.
// Runs share no mutable state, so `parallel` executes them concurrently;
// outputs are written in a fixed order either way. Returns the written
// file paths.
std::vector<std::string> run_experiment(const ExperimentSpec& spec, std::ostream& log,
                                        bool parallel = false);

// CLI entry points. Exit codes: 0 success, 1 validation/infeasibility, 2 I/O.
int cmd_validate(const std::string& manifest_path, std::ostream& out, std::ostream& err);

struct PlanCommand {
  std::string manifest_path;
  double b_init = 30;
  double b_final = 30;
  double b_low = 10;
  double b_high = 50;
  int bins = 50;
  double bandwidth_bps = 0;
  int horizon = 0;  // 0 means all segments
  std::string objective = "alpha:0";
};
int cmd_plan(const PlanCommand& cmd, std::ostream& out, std::ostream& err);

int cmd_simulate(const std::string& spec_path, std::ostream& out, std::ostream& err,
                 bool parallel = false);

struct GenLadderCommand {
  uint64_t seed = 1;
  int segments = 60;
  int levels = 5;
  double tau = 2;
  std::vector<double> bitrates_bps;
  SynthProfile profile;
  std::string output_path;
};
int cmd_gen_ladder(const GenLadderCommand& cmd, std::ostream& out, std::ostream& err);

}  // namespace cq
