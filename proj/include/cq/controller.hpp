#pragma once

#include <string>

#include "cq/online.hpp"

namespace cq {

enum class ControllerKind { PandaCq, PandaBaseline, RateBased };

std::string to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(const std::string& s);

struct ControllerConfig {
  double kappa = 0.28;   // probe convergence gain, 1/s
  double w_bps = 0.3e6;  // probe additive term (0.3 Mbps)
  double a = 0.2;        // EWMA smoothing gain, 1/s
  double beta = 0.2;     // buffer correction gain, 1/s
  double tau = 2;        // seconds per segment
  double b_ref = 30;     // B0
  double b_low = 10;     // B_L
  double b_high = 50;    // B_H
  int max_horizon = 30;  // H
  double epsilon = 0;    // multiplicative safety margin, rate selection only
  int bins = 50;         // planner grid resolution

  void validate() const;
  OnlineConfig online() const;
};

// Per-kind defaults: probing parameters are shared; PANDA/CQ targets B0 = 30
// inside [10, 50] with H = 30, the baselines target B0 = 20 with epsilon = 0.
ControllerConfig default_config(ControllerKind kind);

// Key-value config file with the conventional parameter names
// (kappa, w, a, beta, tau, B0, BL, BH, H, epsilon); w is given in Mbps.
ControllerConfig parse_controller_config(const std::string& path,
                                         ControllerConfig base = {});
void apply_config_override(ControllerConfig& config, const std::string& key,
                           double value);

struct ProbeState {
  double x_hat = 0;         // bandwidth share estimate, bits/s
  double y_hat = 0;         // EWMA-smoothed estimate
  double t_prev = 0;        // duration of the previous step, max(T_hat, T_tilde)
  double x_tilde_prev = 0;  // measured throughput of the previous download
  bool seeded = false;      // set once the first download has been measured
};

struct StepDecision {
  double bitrate_bps = 0;
  int level = 0;
  double target_interval_s = 0;  // time until the next request
  // diagnostics
  double x_hat = 0;
  double y_hat = 0;
  double b_offset = 0;
};

// Probe step: additive increase by kappa*w per second, backing off once the
// estimate overshoots the measured throughput by more than w.
double probe_update(const ProbeState& state, const ControllerConfig& config);

// EWMA step: y moves toward x_hat_new at rate a per second.
double ewma_update(const ProbeState& state, double x_hat_new,
                   const ControllerConfig& config);

// Quality-optimized selection: the online adapter fed with the smoothed
// bandwidth estimate.
OnlineDecision select_cq(const ProbeState& state, double b_prev,
                         const std::vector<std::vector<Level>>& window,
                         const Objective& objective, const ControllerConfig& config);

// R*tau/y + beta*(b_prev - B0) + max(b_offset, 0)/horizon, clamped at 0.
double target_interval(double bitrate_bps, double y_hat, double b_prev,
                       double b_offset, int horizon, const ControllerConfig& config);

// Quality-unaware selection: highest level with bitrate <= (1 - epsilon)*y,
// or the lowest level when none qualifies.
StepDecision select_rate_based(double y_hat, const std::vector<Level>& step_levels,
                               double b_prev, const ControllerConfig& config);

// One streaming session's adaptation loop. decide() runs at each request;
// on_downloaded() feeds back the measured download once it completes. The
// first segment is always fetched at the lowest level and seeds the
// estimators with its measured throughput.
class SessionController {
 public:
  SessionController(ControllerKind kind, ControllerConfig config, Objective objective);

  StepDecision decide(double b_prev, const std::vector<std::vector<Level>>& window);
  void on_downloaded(double throughput_bps, double download_duration_s);

  const ProbeState& state() const { return state_; }
  ControllerKind kind() const { return kind_; }
  const ControllerConfig& config() const { return config_; }

 private:
  ControllerKind kind_;
  ControllerConfig config_;
  Objective objective_;
  ProbeState state_;
  int steps_ = 0;
  double last_t_hat_ = 0;
};

}  // namespace cq
