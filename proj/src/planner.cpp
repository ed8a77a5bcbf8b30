#include "cq/planner.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace cq {

int BufferGrid::bin_of(double b) const {
  if (!contains(b)) throw ValidationError("bin_of: buffer outside [b_low, b_high]");
  const double width = delta_b();
  if (width <= 0) return 0;
  int k = static_cast<int>((b - b_low) / width);
  return std::min(std::max(k, 0), bins - 1);
}

void BufferGrid::validate() const {
  if (!(b_low >= 0)) throw ValidationError("b_low must be >= 0");
  if (!(b_high >= b_low)) throw ValidationError("b_high must be >= b_low");
  if (bins < 1) throw ValidationError("bins must be >= 1");
}

void PlanRequest::validate() const {
  grid.validate();
  objective.validate();
  if (!grid.contains(b_init)) throw ValidationError("b_init outside the buffer grid");
  if (!grid.contains(b_final)) throw ValidationError("b_final outside the buffer grid");
  if (!(bandwidth_bps > 0)) throw ValidationError("bandwidth must be > 0");
  if (!(tau > 0)) throw ValidationError("tau must be > 0");
  if (window.empty()) throw ValidationError("window must cover at least one step");
  for (size_t m = 0; m < window.size(); ++m) {
    if (window[m].empty())
      throw ValidationError("window step " + std::to_string(m) + " has no levels");
    for (const Level& lv : window[m])
      if (!(lv.bitrate_bps > 0))
        throw ValidationError("window step " + std::to_string(m) +
                              ": bitrate must be > 0");
  }
}

double buffer_step(double b_prev, double bitrate_bps, double bandwidth_bps, double tau) {
  return b_prev + tau - tau * bitrate_bps / bandwidth_bps;
}

namespace {

struct Cell {
  bool occupied = false;
  double acc = 0;    // accumulated utility of the surviving path
  double b = 0;      // its exact (unquantized) buffer, inside this bin
  int level = -1;    // level chosen on the arc into this cell
  int prev_bin = -1;
};

// Survivor rule for two paths landing in one bin: higher utility, then
// larger buffer, then lower level index; first arrival (lowest previous
// bin, by iteration order) keeps the cell on a full tie.
bool improves(double acc, double b, int level, const Cell& s) {
  if (!s.occupied) return true;
  if (acc != s.acc) return acc > s.acc;
  if (b != s.b) return b > s.b;
  return level < s.level;
}

int pick_final_bin(const std::vector<Cell>& row, int target_bin) {
  if (row[target_bin].occupied) return target_bin;
  int best = -1;
  for (int k = 0; k < static_cast<int>(row.size()); ++k) {
    if (!row[k].occupied) continue;
    if (best < 0) {
      best = k;
      continue;
    }
    const int dk = std::abs(k - target_bin);
    const int db = std::abs(best - target_bin);
    // ties resolve toward the higher bin: more buffer is the safer restart
    if (dk < db || (dk == db && k > best)) best = k;
  }
  return best;
}

}  // namespace

PlanResult plan(const PlanRequest& request) {
  request.validate();
  const BufferGrid& grid = request.grid;
  const int horizon = request.horizon();
  const int bins = grid.bins;

  std::vector<std::vector<Cell>> table(horizon + 1, std::vector<Cell>(bins));
  Cell& root = table[0][grid.bin_of(request.b_init)];
  root.occupied = true;
  root.acc = accumulator_identity(request.objective);
  root.b = request.b_init;

  long transitions = 0;
  for (int m = 1; m <= horizon; ++m) {
    const auto& options = request.window[m - 1];
    for (int k = 0; k < bins; ++k) {
      const Cell& from = table[m - 1][k];
      if (!from.occupied) continue;
      const std::optional<int> prev_level =
          m >= 2 ? std::optional<int>(from.level) : std::nullopt;
      for (int l = 0; l < static_cast<int>(options.size()); ++l) {
        ++transitions;
        const double b_next = buffer_step(from.b, options[l].bitrate_bps,
                                          request.bandwidth_bps, request.tau);
        if (!grid.contains(b_next)) continue;
        const double u =
            step_utility(options[l].quality, prev_level, l, request.objective);
        const double acc = accumulate(from.acc, u, request.objective);
        Cell& into = table[m][grid.bin_of(b_next)];
        if (improves(acc, b_next, l, into)) {
          into.occupied = true;
          into.acc = acc;
          into.b = b_next;
          into.level = l;
          into.prev_bin = k;
        }
      }
    }
  }

  const int target_bin = grid.bin_of(request.b_final);
  const int final_bin = pick_final_bin(table[horizon], target_bin);
  if (final_bin < 0)
    throw PlanInfeasible("no level sequence keeps the buffer within [" +
                         std::to_string(grid.b_low) + ", " +
                         std::to_string(grid.b_high) + "]");

  PlanResult result;
  result.transitions = transitions;
  result.achieved_utility = table[horizon][final_bin].acc;
  result.b_offset =
      final_bin == target_bin ? 0.0 : table[horizon][final_bin].b - request.b_final;
  result.levels.resize(horizon);
  result.bitrates.resize(horizon);
  result.trajectory.resize(horizon + 1);
  int k = final_bin;
  for (int m = horizon; m >= 1; --m) {
    const Cell& cell = table[m][k];
    result.levels[m - 1] = cell.level;
    result.bitrates[m - 1] = request.window[m - 1][cell.level].bitrate_bps;
    result.trajectory[m] = cell.b;
    k = cell.prev_bin;
  }
  result.trajectory[0] = request.b_init;

  for (double b : result.trajectory)
    if (!grid.contains(b))
      throw std::logic_error("planned trajectory escaped the buffer bounds");
  return result;
}

}  // namespace cq
