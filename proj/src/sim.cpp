#include "cq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "text.hpp"

namespace cq {

double BandwidthTrace::capacity_at(double t) const {
  if (points.empty()) throw ValidationError("empty bandwidth trace");
  double capacity = points.front().capacity_bps;
  for (const Point& p : points) {
    if (p.time_s > t) break;
    capacity = p.capacity_bps;
  }
  return capacity;
}

void BandwidthTrace::validate() const {
  for (size_t i = 0; i < points.size(); ++i) {
    if (i == 0 && points[i].time_s != 0)
      throw ValidationError("trace must start at time 0");
    if (i > 0 && !(points[i].time_s > points[i - 1].time_s))
      throw ValidationError("trace times must be strictly increasing");
    if (!(points[i].capacity_bps > 0))
      throw ValidationError("trace capacities must be > 0");
  }
}

BandwidthTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace '" + path + "'");
  BandwidthTrace trace;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = text::split(line, ',');
    if (fields.size() != 2)
      throw ValidationError("trace line " + std::to_string(line_no) +
                            ": expected 'time_s,capacity_bps'");
    if (line_no == 1 && fields[0] == "time_s") continue;  // optional header
    try {
      trace.points.push_back({std::stod(fields[0]), std::stod(fields[1])});
    } catch (const std::exception&) {
      throw ValidationError("trace line " + std::to_string(line_no) + ": bad number");
    }
  }
  trace.validate();
  return trace;
}

BandwidthTrace parse_trace_inline(const std::string& textual) {
  BandwidthTrace trace;
  for (const std::string& part : text::split(textual, '|')) {
    if (part.empty()) continue;
    auto fields = text::split(part, ':');
    if (fields.size() != 2)
      throw ValidationError("trace point '" + part + "': expected 'time:capacity'");
    try {
      trace.points.push_back({std::stod(fields[0]), std::stod(fields[1])});
    } catch (const std::exception&) {
      throw ValidationError("trace point '" + part + "': bad number");
    }
  }
  trace.validate();
  return trace;
}

namespace {

constexpr double kBitsEps = 1e-6;
constexpr double kTimeEps = 1e-9;

struct SessionState {
  enum class Phase { Waiting, Downloading, Done };

  const ClientSession* spec = nullptr;
  SessionController controller;
  int segments_total = 0;  // segments available from start_segment on
  int fetched = 0;
  Phase phase = Phase::Waiting;
  double next_request_time = 0;
  double request_time = 0;
  double bits_remaining = 0;
  StepDecision pending;

  double buffer = 0;
  bool playout_started = false;
  bool stalled = false;
  double stall_start = 0;
  double playout_start_threshold = 0;

  double played = 0;
  SimReport report;

  SessionState(const ClientSession& s, const ControllerConfig& cfg, const Objective& obj)
      : spec(&s), controller(s.controller, cfg, obj) {}

  int next_segment() const { return spec->start_segment + fetched; }
  bool downloading() const { return phase == Phase::Downloading; }
  bool playing() const { return playout_started && phase != Phase::Done; }
};

void track_buffer(SessionState& s) {
  s.report.max_buffer = std::max(s.report.max_buffer, s.buffer);
  if (s.playout_started) s.report.min_buffer = std::min(s.report.min_buffer, s.buffer);
}

}  // namespace

std::vector<SimReport> run_shared(const std::vector<ClientSession>& sessions,
                                  const BandwidthTrace& trace, const Objective& objective,
                                  const ControllerConfig& config, uint64_t rng_seed,
                                  const SimOptions& options) {
  (void)rng_seed;  // the event loop is deterministic; seeds matter one layer up
  if (sessions.empty()) throw ValidationError("run_shared needs at least one session");
  config.validate();
  objective.validate();
  trace.validate();
  if (trace.empty()) return std::vector<SimReport>(sessions.size());

  const double threshold =
      options.playout_start_s >= 0 ? options.playout_start_s : config.b_ref / 2;

  std::vector<SessionState> states;
  states.reserve(sessions.size());
  for (const ClientSession& s : sessions) {
    if (!s.ladder) throw ValidationError("session has no ladder");
    s.ladder->validate();
    validate_objective_for(objective, s.ladder->convention);
    if (std::abs(s.ladder->tau - config.tau) > 1e-12)
      throw ConfigError("ladder tau " + std::to_string(s.ladder->tau) +
                        " does not match config tau " + std::to_string(config.tau));
    SessionState st(s, config, objective);
    st.segments_total = s.ladder->num_segments() - s.start_segment;
    st.playout_start_threshold = threshold;
    if (st.segments_total <= 0) st.phase = SessionState::Phase::Done;
    states.push_back(std::move(st));
  }

  double now = 0;
  long guard = 0;
  auto all_done = [&] {
    return std::all_of(states.begin(), states.end(), [](const SessionState& s) {
      return s.phase == SessionState::Phase::Done;
    });
  };

  while (!all_done()) {
    if (++guard > 50'000'000) throw std::logic_error("simulation event budget exceeded");

    const double capacity = trace.capacity_at(now);
    int active = 0;
    for (const SessionState& s : states) active += s.downloading();
    const double share = active > 0 ? capacity / active : 0;
    if (active > 0 && share * active > capacity * (1 + 1e-12))
      throw std::logic_error("allotted rates exceed link capacity");

    // earliest next event across the whole system
    double te = std::numeric_limits<double>::infinity();
    for (const auto& p : trace.points)
      if (p.time_s > now + kTimeEps) {
        te = std::min(te, p.time_s);
        break;
      }
    for (const SessionState& s : states) {
      switch (s.phase) {
        case SessionState::Phase::Downloading:
          te = std::min(te, now + s.bits_remaining / share);
          break;
        case SessionState::Phase::Waiting:
          te = std::min(te, std::max(s.next_request_time, now));
          break;
        case SessionState::Phase::Done:
          break;
      }
      if (s.playing() && !s.stalled && s.buffer > kTimeEps)
        te = std::min(te, now + s.buffer);
    }
    if (!std::isfinite(te)) throw std::logic_error("no further simulation events");

    const double dt = std::max(te - now, 0.0);
    if (dt > 0) {
      for (SessionState& s : states) {
        if (s.downloading()) s.bits_remaining = std::max(0.0, s.bits_remaining - share * dt);
        if (s.playing() && !s.stalled) {
          const double drained = std::min(dt, s.buffer);
          s.buffer -= drained;
          s.played += drained;
          track_buffer(s);
        }
      }
      now = te;
    }

    // completions first: a segment arriving exactly as the buffer empties
    // prevents the stall
    for (SessionState& s : states) {
      if (!s.downloading() || s.bits_remaining > kBitsEps) continue;
      const double t_tilde = now - s.request_time;
      const double x_tilde = s.pending.bitrate_bps * config.tau / t_tilde;
      s.controller.on_downloaded(x_tilde, t_tilde);
      s.buffer += config.tau;
      const double t_actual = std::max(s.pending.target_interval_s, t_tilde);
      const SegmentLadder& ladder = *s.spec->ladder;
      const int seg = s.next_segment();
      s.report.steps.push_back({now, seg, s.pending.level, s.pending.bitrate_bps,
                                ladder.segments[seg][s.pending.level].quality, s.buffer,
                                s.pending.x_hat, s.pending.y_hat,
                                s.pending.target_interval_s, t_actual,
                                s.pending.b_offset});
      if (s.stalled) {
        s.report.stalls.push_back({s.stall_start, now - s.stall_start});
        s.stalled = false;
      }
      if (!s.playout_started && s.buffer >= s.playout_start_threshold - kTimeEps) {
        s.playout_started = true;
        s.report.playout_start_time = now;
        s.report.min_buffer = s.buffer;
      }
      track_buffer(s);
      ++s.fetched;
      s.report.end_time = now;
      if (s.fetched >= s.segments_total) {
        s.phase = SessionState::Phase::Done;
      } else {
        s.phase = SessionState::Phase::Waiting;
        s.next_request_time = s.request_time + t_actual;
      }
    }

    for (SessionState& s : states) {
      if (s.playing() && !s.stalled && s.buffer <= kTimeEps) {
        s.stalled = true;
        s.stall_start = now;
        s.buffer = 0;
      }
    }

    for (SessionState& s : states) {
      if (s.phase != SessionState::Phase::Waiting || s.next_request_time > now + kTimeEps)
        continue;
      const int horizon =
          horizon_for(s.fetched + 1, s.segments_total, config.max_horizon);
      const auto window = s.spec->ladder->window(s.next_segment(), horizon);
      s.pending = s.controller.decide(s.buffer, window);
      s.phase = SessionState::Phase::Downloading;
      s.request_time = now;
      s.bits_remaining = s.pending.bitrate_bps * config.tau;
    }
  }

  std::vector<SimReport> reports;
  reports.reserve(states.size());
  for (SessionState& s : states) {
    // downloaded minus played content must equal the buffer
    if (!s.report.steps.empty() &&
        std::abs(s.fetched * config.tau - s.played - s.buffer) > 1e-6)
      throw std::logic_error("buffer conservation violated");
    if (!s.report.steps.empty())
      s.report.summary = compute_metrics(s.report, s.spec->ladder->convention);
    reports.push_back(std::move(s.report));
  }
  return reports;
}

SimReport run_single(const ClientSession& session, const BandwidthTrace& trace,
                     const Objective& objective, const ControllerConfig& config,
                     uint64_t rng_seed, const SimOptions& options) {
  return run_shared({session}, trace, objective, config, rng_seed, options).front();
}

SimReport run_known_bandwidth(const SegmentLadder& ladder, double bandwidth_bps,
                              const OnlineConfig& config, int max_horizon,
                              const Objective& objective, double b_init) {
  ladder.validate();
  config.validate();
  validate_objective_for(objective, ladder.convention);
  if (!(bandwidth_bps > 0)) throw ValidationError("bandwidth must be > 0");
  if (!(b_init >= 0)) throw ValidationError("b_init must be >= 0");

  SimReport report;
  report.playout_start_time = 0;
  report.min_buffer = b_init;
  report.max_buffer = b_init;
  const int total = ladder.num_segments();
  double buffer = b_init;
  double wall = 0;
  for (int n = 1; n <= total; ++n) {
    const int horizon = horizon_for(n, total, max_horizon);
    const auto window = ladder.window(n - 1, horizon);
    const OnlineDecision decision =
        online_step(config, bandwidth_bps, buffer, horizon, window, objective);
    const double next = buffer_step(buffer, decision.bitrate_bps, bandwidth_bps, ladder.tau);
    if (next < 0) report.stalls.push_back({wall, -next});
    buffer = std::max(next, 0.0);
    wall += decision.bitrate_bps * ladder.tau / bandwidth_bps;
    report.steps.push_back({wall, n - 1, decision.level, decision.bitrate_bps,
                            window[0][decision.level].quality, buffer, bandwidth_bps,
                            bandwidth_bps, decision.bitrate_bps * ladder.tau / bandwidth_bps,
                            decision.bitrate_bps * ladder.tau / bandwidth_bps,
                            decision.b_offset});
    report.min_buffer = std::min(report.min_buffer, buffer);
    report.max_buffer = std::max(report.max_buffer, buffer);
  }
  report.end_time = wall;
  report.summary = compute_metrics(report, ladder.convention);
  return report;
}

SummaryMetrics compute_metrics(const SimReport& report, QualityConvention convention) {
  if (report.steps.empty()) throw ValidationError("cannot summarize an empty report");
  SummaryMetrics m;
  const size_t n = report.steps.size();
  double sum = 0;
  m.min_quality = report.steps.front().quality;
  for (const StepRecord& r : report.steps) {
    sum += r.quality;
    m.min_quality = std::min(m.min_quality, r.quality);
    m.avg_bitrate += r.bitrate_bps;
  }
  m.mean_quality = sum / n;
  m.avg_bitrate /= n;
  double var = 0;
  for (const StepRecord& r : report.steps) {
    const double d = r.quality - m.mean_quality;
    var += d * d;
  }
  m.quality_stddev = std::sqrt(var / n);

  if (convention != QualityConvention::AbstractPositive) {
    std::vector<double> psnr;
    psnr.reserve(n);
    for (const StepRecord& r : report.steps)
      psnr.push_back(convention == QualityConvention::NegatedMse ? mse_to_psnr(-r.quality)
                                                                 : r.quality);
    std::sort(psnr.begin(), psnr.end());
    // nearest-rank (lower) percentile
    const size_t rank = std::max<size_t>(1, static_cast<size_t>(std::ceil(0.05 * n)));
    m.psnr_p5 = psnr[rank - 1];
  }

  m.stall_count = static_cast<int>(report.stalls.size());
  for (const StallEvent& s : report.stalls) m.stall_total += s.duration;
  m.min_buffer = report.min_buffer;
  m.max_buffer = report.max_buffer;
  return m;
}

void write_report_csv(const SimReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report '" + path + "'");
  out << "wall_time_s,segment,level,bitrate_bps,quality,buffer_after_s,"
         "x_hat_bps,y_hat_bps,t_hat_s,t_actual_s,b_offset_s\n";
  for (const StepRecord& r : report.steps) {
    out << text::format_double(r.wall_time) << "," << r.segment_index << "," << r.level
        << "," << text::format_double(r.bitrate_bps) << ","
        << text::format_double(r.quality) << "," << text::format_double(r.buffer_after)
        << "," << text::format_double(r.x_hat) << "," << text::format_double(r.y_hat)
        << "," << text::format_double(r.t_hat) << "," << text::format_double(r.t_actual)
        << "," << text::format_double(r.b_offset) << "\n";
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

void write_summary_csv(const SummaryMetrics& summary, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write summary '" + path + "'");
  out << "mean_quality," << text::format_double(summary.mean_quality) << "\n";
  out << "min_quality," << text::format_double(summary.min_quality) << "\n";
  out << "quality_stddev," << text::format_double(summary.quality_stddev) << "\n";
  if (std::isfinite(summary.psnr_p5))
    out << "psnr_p5," << text::format_double(summary.psnr_p5) << "\n";
  out << "avg_bitrate_bps," << text::format_double(summary.avg_bitrate) << "\n";
  out << "stall_count," << summary.stall_count << "\n";
  out << "stall_total_s," << text::format_double(summary.stall_total) << "\n";
  out << "min_buffer_s," << text::format_double(summary.min_buffer) << "\n";
  out << "max_buffer_s," << text::format_double(summary.max_buffer) << "\n";
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace cq
