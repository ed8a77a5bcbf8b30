#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cq/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Consistent-quality HTTP adaptive streaming toolkit"};
  app.require_subcommand(1);

  std::string manifest;
  auto* validate = app.add_subcommand("validate", "Check a ladder manifest");
  validate->add_option("manifest", manifest, "Manifest CSV path")->required();

  cq::PlanCommand plan_cmd;
  auto* plan = app.add_subcommand("plan", "One-shot planner run over a manifest window");
  plan->add_option("manifest", plan_cmd.manifest_path, "Manifest CSV path")->required();
  plan->add_option("--w-bps", plan_cmd.bandwidth_bps, "Constant bandwidth, bits/s")
      ->required();
  plan->add_option("--b-init", plan_cmd.b_init, "Initial buffer, seconds");
  plan->add_option("--b-final", plan_cmd.b_final, "Target final buffer, seconds");
  plan->add_option("--bl", plan_cmd.b_low, "Buffer lower bound, seconds");
  plan->add_option("--bh", plan_cmd.b_high, "Buffer upper bound, seconds");
  plan->add_option("-k,--bins", plan_cmd.bins, "Buffer quantization bins");
  plan->add_option("--horizon", plan_cmd.horizon, "Window length (default: all segments)");
  plan->add_option("--objective", plan_cmd.objective,
                   "maxmin | alpha:<a>[,delta:<d>] (default alpha:0)");

  std::string spec_path;
  bool parallel = false;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario spec file");
  simulate->add_option("spec", spec_path, "Experiment spec path")->required();
  simulate->add_flag("-p,--parallel", parallel, "Run independent runs concurrently");

  cq::GenLadderCommand gen_cmd;
  std::vector<double> bitrates;
  auto* gen = app.add_subcommand("gen-ladder", "Write a synthetic ladder manifest");
  gen->add_option("-o,--output", gen_cmd.output_path, "Output manifest path")->required();
  gen->add_option("--seed", gen_cmd.seed, "RNG seed");
  gen->add_option("--segments", gen_cmd.segments, "Segment count");
  gen->add_option("--tau", gen_cmd.tau, "Seconds per segment");
  gen->add_option("--bitrates", bitrates, "Bitrate set, bits/s, ascending")
      ->required()
      ->delimiter(',');
  gen->add_option("--theta", gen_cmd.profile.theta, "Reference bitrate, bits/s");
  gen->add_option("--gamma", gen_cmd.profile.gamma, "Rate-distortion exponent");
  gen->add_option("--sigma2-min", gen_cmd.profile.sigma2_min, "Scene complexity floor");
  gen->add_option("--sigma2-max", gen_cmd.profile.sigma2_max, "Scene complexity ceiling");
  gen->add_option("--scene-len", gen_cmd.profile.mean_scene_len,
                  "Mean scene length, segments");

  CLI11_PARSE(app, argc, argv);

  if (*validate) return cq::cmd_validate(manifest, std::cout, std::cerr);
  if (*plan) return cq::cmd_plan(plan_cmd, std::cout, std::cerr);
  if (*simulate) return cq::cmd_simulate(spec_path, std::cout, std::cerr, parallel);
  if (*gen) {
    gen_cmd.bitrates_bps = bitrates;
    gen_cmd.levels = static_cast<int>(bitrates.size());
    return cq::cmd_gen_ladder(gen_cmd, std::cout, std::cerr);
  }
  return 1;
}
