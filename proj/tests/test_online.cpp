#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cq/online.hpp"
#include "support/instances.hpp"

using namespace cq;

namespace {

// stationary two-level ladder window: one level gains buffer, one loses
std::vector<std::vector<Level>> stationary_window(int horizon) {
  return std::vector<std::vector<Level>>(horizon, {{0.6e6, 2.0}, {1.4e6, 5.0}});
}

const OnlineConfig kConfig{10, 50, 30, 2, 50};

}  // namespace

TEST_CASE("horizon_for clamps to the remaining segments") {
  CHECK(horizon_for(1, 100, 30) == 30);
  CHECK(horizon_for(96, 100, 30) == 5);
  CHECK(horizon_for(100, 100, 30) == 1);
  CHECK(horizon_for(1, 1, 30) == 1);
  CHECK_THROWS_AS(horizon_for(101, 100, 30), ValidationError);
  CHECK_THROWS_AS(horizon_for(0, 100, 30), ValidationError);
}

TEST_CASE("session start: bounds widen down to an empty buffer") {
  const auto decision =
      online_step(kConfig, 1e6, 0.0, 8, stationary_window(8), Objective::alpha_fair(0));
  CHECK_FALSE(decision.fallback);
  REQUIRE(decision.planned_window.has_value());
  CHECK(decision.planned_window->trajectory.front() == 0.0);
  CHECK(decision.bitrate_bps ==
        decision.planned_window->bitrates.front());  // first step applied
}

TEST_CASE("inside nominal bounds the plan stays inside them") {
  for (double b_prev : {12.0, 30.0, 49.0}) {
    const auto decision = online_step(kConfig, 1e6, b_prev, 10, stationary_window(10),
                                      Objective::alpha_fair(0));
    REQUIRE(decision.planned_window.has_value());
    for (double b : decision.planned_window->trajectory) {
      CHECK(b >= kConfig.b_low);
      CHECK(b <= kConfig.b_high);
    }
  }
}

TEST_CASE("one-step horizon is a per-step argmax") {
  // both levels feasible and ending in one bin; alpha=0 keeps the higher
  // quality as the bin survivor
  const std::vector<std::vector<Level>> window{{{1.05e6, 2.0}, {1.1e6, 5.0}}};
  const auto decision = online_step(kConfig, 1e6, 30.0, 1, window, Objective::alpha_fair(0));
  CHECK(decision.level == 1);
}

TEST_CASE("output bitrate always comes from the step-1 level set") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    const PlanRequest req = cqtest::random_request(seed);
    OnlineConfig cfg;
    cfg.b_low = req.grid.b_low;
    cfg.b_high = std::max(req.grid.b_high, req.grid.b_low + 1);
    cfg.b_ref = 0.5 * (cfg.b_low + cfg.b_high);
    cfg.tau = req.tau;
    cfg.bins = req.grid.bins;
    const auto decision = online_step(cfg, req.bandwidth_bps, req.b_init, req.horizon(),
                                      req.window, req.objective);
    bool member = false;
    for (const Level& lv : req.window.front())
      member = member || lv.bitrate_bps == decision.bitrate_bps;
    CHECK(member);
  }
}

TEST_CASE("closed loop converges into the bounds and toward the reference") {
  double buffer = 0.0;
  const double bandwidth = 1e6;
  const Objective obj = Objective::alpha_fair(0);
  for (int n = 0; n < 200; ++n) {
    const auto decision =
        online_step(kConfig, bandwidth, buffer, 12, stationary_window(12), obj);
    buffer = std::max(0.0, buffer_step(buffer, decision.bitrate_bps, bandwidth, kConfig.tau));
  }
  CHECK(buffer >= kConfig.b_low);
  CHECK(buffer <= kConfig.b_high);
}

TEST_CASE("recovery from below the lower bound targets the reference buffer") {
  for (double b_prev : {2.0, 6.0, 9.5}) {
    const auto decision = online_step(kConfig, 1e6, b_prev, 12, stationary_window(12),
                                      Objective::alpha_fair(0));
    REQUIRE(decision.planned_window.has_value());
    const double width = (kConfig.b_high - kConfig.b_low) / kConfig.bins;
    const double final_buffer = decision.planned_window->trajectory.back();
    CHECK(std::abs(final_buffer - (kConfig.b_ref + decision.b_offset)) <= width + 1e-9);
  }
}

TEST_CASE("total infeasibility falls back to the lowest level") {
  // bandwidth far above every bitrate: every path overshoots b_high fast
  const auto window = stationary_window(30);
  const auto decision =
      online_step(kConfig, 200e6, 49.0, 30, window, Objective::alpha_fair(0));
  CHECK(decision.fallback);
  CHECK(decision.level == 0);
  CHECK(decision.bitrate_bps == 0.6e6);
  CHECK_FALSE(decision.planned_window.has_value());
}

TEST_CASE("bandwidth above the ladder yields a positive buffer offset") {
  // short horizon keeps the climb feasible; the ending lands above B0
  const auto decision =
      online_step(kConfig, 50e6, 30.0, 3, stationary_window(3), Objective::alpha_fair(0));
  CHECK_FALSE(decision.fallback);
  CHECK(decision.b_offset > 0);
}

TEST_CASE("window length must match the horizon") {
  CHECK_THROWS_AS(
      online_step(kConfig, 1e6, 30.0, 3, stationary_window(2), Objective::alpha_fair(0)),
      ValidationError);
}
