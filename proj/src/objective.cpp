#include "cq/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cq {

Objective Objective::alpha_fair(double alpha, std::optional<double> delta_diff) {
  Objective o;
  o.kind = Kind::AlphaFair;
  o.alpha = alpha;
  o.delta_diff = delta_diff;
  o.validate();
  return o;
}

Objective Objective::max_min() {
  Objective o;
  o.kind = Kind::MaxMin;
  return o;
}

void Objective::validate() const {
  if (kind == Kind::AlphaFair && !(alpha >= 0))
    throw ValidationError("alpha must be >= 0");
  if (delta_diff) {
    if (kind != Kind::AlphaFair)
      throw ValidationError("switching discount applies to alpha-fair objectives only");
    if (!(*delta_diff > 0 && *delta_diff <= 1))
      throw ValidationError("delta_diff must be in (0, 1]");
  }
}

void validate_objective_for(const Objective& objective, QualityConvention convention) {
  objective.validate();
  if (convention == QualityConvention::NegatedMse &&
      objective.kind == Objective::Kind::AlphaFair && objective.alpha != 0)
    throw ValidationError(
        "negated-mse qualities are non-positive; use alpha = 0 or max-min");
}

double u_alpha(double q, double alpha) {
  if (alpha < 0) throw std::domain_error("alpha must be >= 0");
  if (alpha == 0) return q;
  if (!(q > 0))
    throw std::domain_error("u_alpha: quality must be > 0 for alpha = " +
                            std::to_string(alpha));
  if (alpha == 1) return std::log(q);
  return std::pow(q, 1 - alpha) / (1 - alpha);
}

double step_utility(double q, std::optional<int> prev_level, int cur_level,
                    const Objective& objective) {
  if (objective.kind == Objective::Kind::MaxMin) return q;
  double delta = 1.0;
  if (prev_level && *prev_level != cur_level && objective.delta_diff)
    delta = *objective.delta_diff;
  return delta * u_alpha(q, objective.alpha);
}

double accumulator_identity(const Objective& objective) {
  return objective.kind == Objective::Kind::MaxMin
             ? std::numeric_limits<double>::infinity()
             : 0.0;
}

double accumulate(double acc, double u, const Objective& objective) {
  return objective.kind == Objective::Kind::MaxMin ? std::min(acc, u) : acc + u;
}

}  // namespace cq
