#pragma once

#include <vector>

#include "cq/objective.hpp"

namespace cq {

// Quantization of [b_low, b_high] into `bins` half-open intervals; the top
// interval is closed so bin_of is total on the whole range.
struct BufferGrid {
  double b_low = 0;   // seconds
  double b_high = 0;  // seconds
  int bins = 1;

  double delta_b() const { return (b_high - b_low) / bins; }
  bool contains(double b) const { return b >= b_low && b <= b_high; }
  int bin_of(double b) const;  // 0-based index in [0, bins)
  void validate() const;
};

struct PlanRequest {
  double b_init = 0;   // seconds, inside the grid
  double b_final = 0;  // target final buffer, inside the grid
  BufferGrid grid;
  double tau = 0;            // seconds per segment
  double bandwidth_bps = 0;  // assumed constant over the window
  // Per-step level options; the horizon is the window length.
  std::vector<std::vector<Level>> window;
  Objective objective;

  int horizon() const { return static_cast<int>(window.size()); }
  void validate() const;
};

struct PlanResult {
  std::vector<int> levels;         // chosen level per step, length H
  std::vector<double> bitrates;    // R(m), length H
  double achieved_utility = 0;     // accumulated along the chosen path
  std::vector<double> trajectory;  // buffer B(0..H), length H + 1
  double b_offset = 0;             // final buffer minus target; 0 unless the
                                   // nearest-occupied-bin fallback engaged
  long transitions = 0;            // forward-pass transition evaluations
};

// Buffer evolution over one step: b_prev + tau - tau * bitrate / bandwidth.
double buffer_step(double b_prev, double bitrate_bps, double bandwidth_bps, double tau);

// Finite-horizon utility maximization over quantized buffer states.
// Throws PlanInfeasible when no level sequence stays within bounds.
PlanResult plan(const PlanRequest& request);

// Exhaustive oracle: walks every level sequence while applying the same
// quantized feasibility and per-bin survivor rules as plan, so results match
// exactly. Guarded to L^H <= 1e7.
PlanResult brute_force_plan(const PlanRequest& request);

}  // namespace cq
