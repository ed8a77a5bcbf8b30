#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "cq/controller.hpp"

namespace cq {

// Piecewise-constant link capacity: each point holds from its time until
// the next; the last one extends indefinitely.
struct BandwidthTrace {
  struct Point {
    double time_s = 0;
    double capacity_bps = 0;
  };
  std::vector<Point> points;

  bool empty() const { return points.empty(); }
  double capacity_at(double t) const;
  void validate() const;  // times strictly increasing from 0, capacities > 0
};

BandwidthTrace load_trace(const std::string& path);
// "0:5000000|200:2000000|300:5000000"
BandwidthTrace parse_trace_inline(const std::string& text);

struct ClientSession {
  ControllerKind controller = ControllerKind::PandaCq;
  std::shared_ptr<const SegmentLadder> ladder;
  int start_segment = 0;
};

struct StepRecord {
  double wall_time = 0;  // completion time of the fetch
  int segment_index = 0;
  int level = 0;
  double bitrate_bps = 0;
  double quality = 0;
  double buffer_after = 0;
  double x_hat = 0;
  double y_hat = 0;
  double t_hat = 0;     // target inter-request interval
  double t_actual = 0;  // realized step duration, max(t_hat, download time)
  double b_offset = 0;
};

struct StallEvent {
  double start_time = 0;
  double duration = 0;
};

struct SummaryMetrics {
  double mean_quality = 0;
  double min_quality = 0;
  double quality_stddev = 0;
  double psnr_p5 = std::numeric_limits<double>::quiet_NaN();
  double avg_bitrate = 0;
  int stall_count = 0;
  double stall_total = 0;
  double min_buffer = 0;
  double max_buffer = 0;
};

struct SimReport {
  std::vector<StepRecord> steps;
  std::vector<StallEvent> stalls;
  double playout_start_time = -1;  // -1 when playout never started
  double end_time = 0;             // last completion
  double min_buffer = 0;           // continuous minimum after playout start
  double max_buffer = 0;
  SummaryMetrics summary;
};

struct SimOptions {
  // Buffer level at which playout begins; < 0 means b_ref / 2.
  double playout_start_s = -1;
};

// Deterministic fluid-flow playout simulation. Capacity splits equally among
// sessions with an active download; sessions in an off-interval consume
// nothing. The seed only matters to scenario layers that regenerate synthetic
// ladders; the event loop itself is seed-free.
std::vector<SimReport> run_shared(const std::vector<ClientSession>& sessions,
                                  const BandwidthTrace& trace, const Objective& objective,
                                  const ControllerConfig& config, uint64_t rng_seed = 0,
                                  const SimOptions& options = {});

SimReport run_single(const ClientSession& session, const BandwidthTrace& trace,
                     const Objective& objective, const ControllerConfig& config,
                     uint64_t rng_seed = 0, const SimOptions& options = {});

// Closed loop with the bandwidth known exactly and no gaps between
// downloads: the setting of the planner/horizon trend studies.
SimReport run_known_bandwidth(const SegmentLadder& ladder, double bandwidth_bps,
                              const OnlineConfig& config, int max_horizon,
                              const Objective& objective, double b_init);

SummaryMetrics compute_metrics(const SimReport& report, QualityConvention convention);

void write_report_csv(const SimReport& report, const std::string& path);
void write_summary_csv(const SummaryMetrics& summary, const std::string& path);

}  // namespace cq
