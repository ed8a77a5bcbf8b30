#include "cq/controller.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cq {

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::PandaCq: return "panda-cq";
    case ControllerKind::PandaBaseline: return "panda-baseline";
    case ControllerKind::RateBased: return "rate-based";
  }
  return "panda-cq";
}

ControllerKind controller_kind_from_string(const std::string& s) {
  if (s == "panda-cq") return ControllerKind::PandaCq;
  if (s == "panda-baseline") return ControllerKind::PandaBaseline;
  if (s == "rate-based") return ControllerKind::RateBased;
  throw ConfigError("unknown controller '" + s + "'");
}

void ControllerConfig::validate() const {
  if (!(kappa > 0 && w_bps > 0 && a > 0 && beta > 0))
    throw ConfigError("gains kappa, w, a, beta must be > 0");
  if (!(tau > 0)) throw ConfigError("tau must be > 0");
  if (!(epsilon >= 0)) throw ConfigError("epsilon must be >= 0");
  if (max_horizon < 1) throw ConfigError("H must be >= 1");
  online().validate();
}

OnlineConfig ControllerConfig::online() const {
  OnlineConfig cfg;
  cfg.b_low = b_low;
  cfg.b_high = b_high;
  cfg.b_ref = b_ref;
  cfg.tau = tau;
  cfg.bins = bins;
  return cfg;
}

ControllerConfig default_config(ControllerKind kind) {
  ControllerConfig cfg;
  if (kind != ControllerKind::PandaCq) {
    cfg.b_ref = 20;
    cfg.epsilon = 0;
  }
  return cfg;
}

void apply_config_override(ControllerConfig& config, const std::string& key,
                           double value) {
  if (key == "kappa") config.kappa = value;
  else if (key == "w") config.w_bps = value * 1e6;  // Mbps in configs
  else if (key == "a") config.a = value;
  else if (key == "beta") config.beta = value;
  else if (key == "tau") config.tau = value;
  else if (key == "B0") config.b_ref = value;
  else if (key == "BL") config.b_low = value;
  else if (key == "BH") config.b_high = value;
  else if (key == "H") config.max_horizon = static_cast<int>(value);
  else if (key == "epsilon") config.epsilon = value;
  else if (key == "bins") config.bins = static_cast<int>(value);
  else throw ConfigError("unknown config key '" + key + "'");
}

ControllerConfig parse_controller_config(const std::string& path, ControllerConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const size_t sep = line.find(',');
    if (sep == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'key,value'");
    const std::string key = line.substr(0, sep);
    double value = 0;
    try {
      value = std::stod(line.substr(sep + 1));
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": bad value for '" + key + "'");
    }
    apply_config_override(base, key, value);
  }
  base.validate();
  return base;
}

double probe_update(const ProbeState& state, const ControllerConfig& config) {
  const double error = state.x_hat - state.x_tilde_prev;
  // additive ramp while at least w below the measured throughput
  if (error <= -config.w_bps)
    return state.x_hat + state.t_prev * config.kappa * config.w_bps;
  // proportional pull toward the throughput; the per-step gain saturates at
  // full replacement so long steps cannot overshoot past the measurement
  return state.x_hat - std::min(state.t_prev * config.kappa, 1.0) * error;
}

double ewma_update(const ProbeState& state, double x_hat_new,
                   const ControllerConfig& config) {
  return state.y_hat +
         std::min(state.t_prev * config.a, 1.0) * (x_hat_new - state.y_hat);
}

OnlineDecision select_cq(const ProbeState& state, double b_prev,
                         const std::vector<std::vector<Level>>& window,
                         const Objective& objective, const ControllerConfig& config) {
  if (window.empty()) throw ValidationError("select_cq: window must be non-empty");
  return online_step(config.online(), state.y_hat, b_prev,
                     static_cast<int>(window.size()), window, objective);
}

double target_interval(double bitrate_bps, double y_hat, double b_prev,
                       double b_offset, int horizon, const ControllerConfig& config) {
  if (!(y_hat > 0)) throw ValidationError("target_interval: y_hat must be > 0");
  if (horizon < 1) throw ValidationError("target_interval: horizon must be >= 1");
  const double t = bitrate_bps * config.tau / y_hat +
                   config.beta * (b_prev - config.b_ref) +
                   std::max(b_offset, 0.0) / horizon;
  return std::max(t, 0.0);
}

StepDecision select_rate_based(double y_hat, const std::vector<Level>& step_levels,
                               double b_prev, const ControllerConfig& config) {
  if (step_levels.empty())
    throw ValidationError("select_rate_based: step_levels must be non-empty");
  const double budget = (1 - config.epsilon) * y_hat;
  int chosen = 0;
  for (int l = 0; l < static_cast<int>(step_levels.size()); ++l)
    if (step_levels[l].bitrate_bps <= budget &&
        step_levels[l].bitrate_bps >= step_levels[chosen].bitrate_bps)
      chosen = l;
  // fall back to the cheapest level when nothing fits the budget
  if (step_levels[chosen].bitrate_bps > budget) {
    chosen = 0;
    for (int l = 1; l < static_cast<int>(step_levels.size()); ++l)
      if (step_levels[l].bitrate_bps < step_levels[chosen].bitrate_bps) chosen = l;
  }
  StepDecision decision;
  decision.level = chosen;
  decision.bitrate_bps = step_levels[chosen].bitrate_bps;
  decision.y_hat = y_hat;
  decision.target_interval_s =
      target_interval(decision.bitrate_bps, y_hat, b_prev, 0.0, 1, config);
  return decision;
}

SessionController::SessionController(ControllerKind kind, ControllerConfig config,
                                     Objective objective)
    : kind_(kind), config_(config), objective_(objective) {
  config_.validate();
  objective_.validate();
}

StepDecision SessionController::decide(double b_prev,
                                       const std::vector<std::vector<Level>>& window) {
  if (window.empty()) throw ValidationError("decide: window must be non-empty");
  StepDecision decision;
  if (steps_ == 0) {
    // cold start: fetch the lowest level immediately, estimators unseeded
    const auto& first = window.front();
    int lowest = 0;
    for (int l = 1; l < static_cast<int>(first.size()); ++l)
      if (first[l].bitrate_bps < first[lowest].bitrate_bps) lowest = l;
    decision.level = lowest;
    decision.bitrate_bps = first[lowest].bitrate_bps;
    decision.target_interval_s = 0;
  } else {
    const double x_hat = kind_ == ControllerKind::RateBased
                             ? state_.x_tilde_prev
                             : probe_update(state_, config_);
    const double y_hat = ewma_update(state_, x_hat, config_);
    state_.x_hat = x_hat;
    state_.y_hat = y_hat;
    if (kind_ == ControllerKind::PandaCq) {
      OnlineDecision sel = select_cq(state_, b_prev, window, objective_, config_);
      decision.level = sel.level;
      decision.bitrate_bps = sel.bitrate_bps;
      decision.b_offset = sel.b_offset;
      decision.target_interval_s =
          target_interval(sel.bitrate_bps, y_hat, b_prev, sel.b_offset,
                          static_cast<int>(window.size()), config_);
    } else {
      decision = select_rate_based(y_hat, window.front(), b_prev, config_);
    }
    decision.x_hat = x_hat;
    decision.y_hat = y_hat;
  }
  ++steps_;
  last_t_hat_ = decision.target_interval_s;
  return decision;
}

void SessionController::on_downloaded(double throughput_bps, double download_duration_s) {
  if (!(throughput_bps > 0) || !(download_duration_s > 0))
    throw ValidationError("on_downloaded: measurements must be > 0");
  state_.t_prev = std::max(last_t_hat_, download_duration_s);
  state_.x_tilde_prev = throughput_bps;
  if (!state_.seeded) {
    state_.x_hat = throughput_bps;
    state_.y_hat = throughput_bps;
    state_.seeded = true;
  }
}

}  // namespace cq
