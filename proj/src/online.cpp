#include "cq/online.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cq {

void OnlineConfig::validate() const {
  if (!(b_low >= 0)) throw ValidationError("b_low must be >= 0");
  if (!(b_low <= b_ref && b_ref <= b_high))
    throw ValidationError("need b_low <= b_ref <= b_high");
  if (!(tau > 0)) throw ValidationError("tau must be > 0");
  if (bins < 1) throw ValidationError("bins must be >= 1");
}

OnlineDecision online_step(const OnlineConfig& config, double bandwidth_bps,
                           double b_prev, int horizon,
                           const std::vector<std::vector<Level>>& window,
                           const Objective& objective) {
  config.validate();
  if (horizon < 1 || static_cast<int>(window.size()) != horizon)
    throw ValidationError("window length must equal the horizon (>= 1)");
  if (!(b_prev >= 0)) throw ValidationError("b_prev must be >= 0");

  PlanRequest request;
  request.b_init = b_prev;
  request.b_final = config.b_ref;
  request.grid.b_low = std::min(config.b_low, b_prev);
  request.grid.b_high = std::max(config.b_high, b_prev);
  // keep the nominal bin width as the interval stretches
  const double nominal_span = config.b_high - config.b_low;
  const double span = request.grid.b_high - request.grid.b_low;
  if (nominal_span > 0 && span > 0) {
    const double width = nominal_span / config.bins;
    request.grid.bins = std::max(1, static_cast<int>(std::ceil(span / width - 1e-9)));
  } else {
    request.grid.bins = 1;
  }
  request.tau = config.tau;
  request.bandwidth_bps = bandwidth_bps;
  request.window = window;
  request.objective = objective;

  OnlineDecision decision;
  try {
    PlanResult planned = plan(request);
    decision.level = planned.levels.front();
    decision.bitrate_bps = planned.bitrates.front();
    decision.b_offset = planned.b_offset;
    decision.planned_window = std::move(planned);
  } catch (const PlanInfeasible&) {
    // nothing keeps the buffer in bounds: fetch the cheapest segment
    const auto& first = window.front();
    int lowest = 0;
    for (int l = 1; l < static_cast<int>(first.size()); ++l)
      if (first[l].bitrate_bps < first[lowest].bitrate_bps) lowest = l;
    decision.level = lowest;
    decision.bitrate_bps = first[lowest].bitrate_bps;
    decision.fallback = true;
  }
  return decision;
}

int horizon_for(int step_index, int total_segments, int max_horizon) {
  if (step_index < 1 || step_index > total_segments)
    throw ValidationError("step_index must be in [1, total_segments]");
  if (max_horizon < 1) throw ValidationError("max_horizon must be >= 1");
  return std::min(max_horizon, total_segments - step_index + 1);
}

}  // namespace cq
