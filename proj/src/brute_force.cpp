#include <cmath>
#include <cstdlib>
#include <map>
#include <string>

#include "cq/planner.hpp"

namespace cq {

namespace {

// A fully-expanded candidate path with its exact trajectory and utility.
struct Path {
  double acc = 0;
  double b = 0;
  std::vector<int> levels;
  std::vector<double> trajectory;
};

}  // namespace

// Independent re-derivation of the planner's semantics: expand every level
// choice from every surviving prefix, collapsing per buffer bin with the
// same rule set (utility, then buffer, then level, then first arrival from
// the lowest previous bin). Kept table-free so it cross-checks the planner's
// indexing and backtracking rather than mirroring them.
PlanResult brute_force_plan(const PlanRequest& request) {
  request.validate();
  const int horizon = request.horizon();
  size_t max_levels = 0;
  for (const auto& step : request.window) max_levels = std::max(max_levels, step.size());
  if (std::pow(static_cast<double>(max_levels), horizon) > 1e7)
    throw InstanceTooLarge("L^H exceeds the enumeration budget of 1e7");

  const BufferGrid& grid = request.grid;
  std::map<int, Path> layer;
  layer[grid.bin_of(request.b_init)] =
      Path{accumulator_identity(request.objective), request.b_init, {}, {request.b_init}};

  for (int m = 1; m <= horizon; ++m) {
    const auto& options = request.window[m - 1];
    std::map<int, Path> next;
    for (const auto& [from_bin, path] : layer) {  // ascending bin order
      (void)from_bin;
      for (int l = 0; l < static_cast<int>(options.size()); ++l) {
        const double b =
            buffer_step(path.b, options[l].bitrate_bps, request.bandwidth_bps, request.tau);
        if (b < grid.b_low || b > grid.b_high) continue;
        std::optional<int> prev;
        if (!path.levels.empty()) prev = path.levels.back();
        const double acc = accumulate(
            path.acc, step_utility(options[l].quality, prev, l, request.objective),
            request.objective);
        auto [it, inserted] = next.try_emplace(grid.bin_of(b));
        Path& held = it->second;
        const bool replace =
            inserted || acc > held.acc ||
            (acc == held.acc && (b > held.b || (b == held.b && l < held.levels.back())));
        if (!replace) continue;
        held.acc = acc;
        held.b = b;
        held.levels = path.levels;
        held.levels.push_back(l);
        held.trajectory = path.trajectory;
        held.trajectory.push_back(b);
      }
    }
    layer = std::move(next);
    if (layer.empty())
      throw PlanInfeasible("no level sequence keeps the buffer within [" +
                           std::to_string(grid.b_low) + ", " +
                           std::to_string(grid.b_high) + "]");
  }

  const int target = grid.bin_of(request.b_final);
  const Path* chosen = nullptr;
  int chosen_bin = -1;
  if (auto it = layer.find(target); it != layer.end()) {
    chosen = &it->second;
    chosen_bin = target;
  } else {
    for (const auto& [bin, path] : layer) {
      if (!chosen || std::abs(bin - target) < std::abs(chosen_bin - target) ||
          (std::abs(bin - target) == std::abs(chosen_bin - target) && bin > chosen_bin)) {
        chosen = &path;
        chosen_bin = bin;
      }
    }
  }

  PlanResult result;
  result.levels = chosen->levels;
  result.trajectory = chosen->trajectory;
  result.achieved_utility = chosen->acc;
  result.b_offset = chosen_bin == target ? 0.0 : chosen->b - request.b_final;
  result.bitrates.reserve(horizon);
  for (int m = 0; m < horizon; ++m)
    result.bitrates.push_back(request.window[m][result.levels[m]].bitrate_bps);
  return result;
}

}  // namespace cq
