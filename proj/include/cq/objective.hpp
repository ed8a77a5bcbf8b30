#pragma once

#include <optional>

#include "cq/errors.hpp"
#include "cq/ladder.hpp"

namespace cq {

// Optimization objective over a window of segments: alpha-fairness of the
// per-segment quality, optionally discounted on level switches, or max-min.
struct Objective {
  enum class Kind { AlphaFair, MaxMin };

  Kind kind = Kind::AlphaFair;
  double alpha = 0.0;
  // Switch discount multiplier: 1 when adjacent segments share a level,
  // delta_diff in (0, 1] otherwise. Alpha-fair only.
  std::optional<double> delta_diff;

  static Objective alpha_fair(double alpha, std::optional<double> delta_diff = {});
  static Objective max_min();

  void validate() const;
};

// Rejects combinations the quality scale cannot support (negated-MSE
// qualities are negative, so only alpha = 0 and max-min apply).
void validate_objective_for(const Objective& objective, QualityConvention convention);

// q^(1-alpha)/(1-alpha), with the alpha = 1 limiting form ln(q).
double u_alpha(double q, double alpha);

// Per-step utility: discounted alpha-fair utility, or the raw quality under
// max-min (the accumulator applies min downstream).
double step_utility(double q, std::optional<int> prev_level, int cur_level,
                    const Objective& objective);

// The planner folds step utilities with a monotone associative combiner:
// sum for alpha-fair, min for max-min.
double accumulator_identity(const Objective& objective);
double accumulate(double acc, double u, const Objective& objective);

}  // namespace cq
