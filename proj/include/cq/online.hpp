#pragma once

#include <optional>

#include "cq/planner.hpp"

namespace cq {

struct OnlineConfig {
  double b_low = 10;   // B_L, seconds
  double b_high = 50;  // B_H
  double b_ref = 30;   // B0, the buffer level to converge toward
  double tau = 2;
  int bins = 50;  // grid resolution over the nominal [b_low, b_high]

  void validate() const;
};

struct OnlineDecision {
  double bitrate_bps = 0;
  int level = 0;
  double b_offset = 0;
  bool fallback = false;  // planner infeasible even with widened bounds;
                          // the lowest level was chosen instead
  std::optional<PlanResult> planned_window;
};

// One step of the sliding-window adapter: plan from b_prev toward B0 over
// bounds transiently widened to [min(B_L, b_prev), max(B_H, b_prev)], with
// the bin width preserved, and apply only the first decision.
OnlineDecision online_step(const OnlineConfig& config, double bandwidth_bps,
                           double b_prev, int horizon,
                           const std::vector<std::vector<Level>>& window,
                           const Objective& objective);

// Horizon at a 1-based step: max_horizon clamped to the remaining segments.
int horizon_for(int step_index, int total_segments, int max_horizon);

}  // namespace cq
