#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cq/experiment.hpp"

namespace py = pybind11;
using namespace cq;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Consistent-quality HTTP adaptive streaming: planner, online "
            "adapter, probing controller and fluid simulator";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<InstanceTooLarge>(m, "InstanceTooLarge", PyExc_ValueError);
  py::register_exception<PlanInfeasible>(m, "InfeasibleError");

  py::enum_<QualityConvention>(m, "QualityConvention")
      .value("negated_mse", QualityConvention::NegatedMse)
      .value("psnr", QualityConvention::Psnr)
      .value("abstract_positive", QualityConvention::AbstractPositive);

  py::class_<Level>(m, "Level")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("bitrate_bps"), py::arg("quality"))
      .def_readwrite("bitrate_bps", &Level::bitrate_bps)
      .def_readwrite("quality", &Level::quality)
      .def("__repr__", [](const Level& l) {
        return "Level(bitrate_bps=" + std::to_string(l.bitrate_bps) +
               ", quality=" + std::to_string(l.quality) + ")";
      });

  py::class_<SegmentLadder, std::shared_ptr<SegmentLadder>>(m, "SegmentLadder")
      .def(py::init<>())
      .def_readwrite("tau", &SegmentLadder::tau)
      .def_readwrite("convention", &SegmentLadder::convention)
      .def_readwrite("segments", &SegmentLadder::segments)
      .def("num_segments", &SegmentLadder::num_segments)
      .def("num_levels", &SegmentLadder::num_levels)
      .def("window", &SegmentLadder::window, py::arg("start"), py::arg("count"))
      .def("validate", &SegmentLadder::validate);

  m.def("load_manifest", &load_manifest, py::arg("path"));
  m.def("write_manifest", &write_manifest, py::arg("ladder"), py::arg("path"));
  m.def("mse_to_psnr", &mse_to_psnr, py::arg("mse"), py::arg("cap") = 100.0);

  py::class_<SynthProfile>(m, "SynthProfile")
      .def(py::init<>())
      .def_readwrite("theta", &SynthProfile::theta)
      .def_readwrite("gamma", &SynthProfile::gamma)
      .def_readwrite("sigma2_min", &SynthProfile::sigma2_min)
      .def_readwrite("sigma2_max", &SynthProfile::sigma2_max)
      .def_readwrite("mean_scene_len", &SynthProfile::mean_scene_len);

  m.def("synthetic_mse", &synthetic_mse, py::arg("sigma2"), py::arg("bitrate_bps"),
        py::arg("profile") = SynthProfile{});
  m.def("gen_synthetic_ladder", &gen_synthetic_ladder, py::arg("seed"), py::arg("segments"),
        py::arg("levels"), py::arg("tau"), py::arg("bitrate_set_bps"),
        py::arg("profile") = SynthProfile{});

  py::class_<Objective> objective(m, "Objective");
  py::enum_<Objective::Kind>(objective, "Kind")
      .value("alpha_fair", Objective::Kind::AlphaFair)
      .value("max_min", Objective::Kind::MaxMin);
  objective.def(py::init<>())
      .def_readwrite("kind", &Objective::kind)
      .def_readwrite("alpha", &Objective::alpha)
      .def_readwrite("delta_diff", &Objective::delta_diff)
      .def_static("alpha_fair", &Objective::alpha_fair, py::arg("alpha"),
                  py::arg("delta_diff") = std::nullopt)
      .def_static("max_min", &Objective::max_min)
      .def("validate", &Objective::validate);

  m.def("validate_objective_for", &validate_objective_for, py::arg("objective"),
        py::arg("convention"));
  m.def("u_alpha", &u_alpha, py::arg("q"), py::arg("alpha"));
  m.def("step_utility", &step_utility, py::arg("q"), py::arg("prev_level"),
        py::arg("cur_level"), py::arg("objective"));

  py::class_<BufferGrid>(m, "BufferGrid")
      .def(py::init<>())
      .def(py::init<double, double, int>(), py::arg("b_low"), py::arg("b_high"),
           py::arg("bins"))
      .def_readwrite("b_low", &BufferGrid::b_low)
      .def_readwrite("b_high", &BufferGrid::b_high)
      .def_readwrite("bins", &BufferGrid::bins)
      .def("delta_b", &BufferGrid::delta_b)
      .def("bin_of", &BufferGrid::bin_of, py::arg("b"))
      .def("contains", &BufferGrid::contains, py::arg("b"));

  py::class_<PlanRequest>(m, "PlanRequest")
      .def(py::init<>())
      .def_readwrite("b_init", &PlanRequest::b_init)
      .def_readwrite("b_final", &PlanRequest::b_final)
      .def_readwrite("grid", &PlanRequest::grid)
      .def_readwrite("tau", &PlanRequest::tau)
      .def_readwrite("bandwidth_bps", &PlanRequest::bandwidth_bps)
      .def_readwrite("window", &PlanRequest::window)
      .def_readwrite("objective", &PlanRequest::objective)
      .def("horizon", &PlanRequest::horizon);

  py::class_<PlanResult>(m, "PlanResult")
      .def_readonly("levels", &PlanResult::levels)
      .def_readonly("bitrates", &PlanResult::bitrates)
      .def_readonly("achieved_utility", &PlanResult::achieved_utility)
      .def_readonly("trajectory", &PlanResult::trajectory)
      .def_readonly("b_offset", &PlanResult::b_offset)
      .def_readonly("transitions", &PlanResult::transitions);

  m.def("buffer_step", &buffer_step, py::arg("b_prev"), py::arg("bitrate_bps"),
        py::arg("bandwidth_bps"), py::arg("tau"));
  m.def("plan", &plan, py::arg("request"));
  m.def("brute_force_plan", &brute_force_plan, py::arg("request"));

  py::class_<OnlineConfig>(m, "OnlineConfig")
      .def(py::init<>())
      .def(py::init([](double b_low, double b_high, double b_ref, double tau, int bins) {
             return OnlineConfig{b_low, b_high, b_ref, tau, bins};
           }),
           py::arg("b_low"), py::arg("b_high"), py::arg("b_ref"), py::arg("tau"),
           py::arg("bins") = 50)
      .def_readwrite("b_low", &OnlineConfig::b_low)
      .def_readwrite("b_high", &OnlineConfig::b_high)
      .def_readwrite("b_ref", &OnlineConfig::b_ref)
      .def_readwrite("tau", &OnlineConfig::tau)
      .def_readwrite("bins", &OnlineConfig::bins);

  py::class_<OnlineDecision>(m, "OnlineDecision")
      .def_readonly("bitrate_bps", &OnlineDecision::bitrate_bps)
      .def_readonly("level", &OnlineDecision::level)
      .def_readonly("b_offset", &OnlineDecision::b_offset)
      .def_readonly("fallback", &OnlineDecision::fallback)
      .def_readonly("planned_window", &OnlineDecision::planned_window);

  m.def("online_step", &online_step, py::arg("config"), py::arg("bandwidth_bps"),
        py::arg("b_prev"), py::arg("horizon"), py::arg("window"), py::arg("objective"));
  m.def("horizon_for", &horizon_for, py::arg("step_index"), py::arg("total_segments"),
        py::arg("max_horizon"));

  py::enum_<ControllerKind>(m, "ControllerKind")
      .value("panda_cq", ControllerKind::PandaCq)
      .value("panda_baseline", ControllerKind::PandaBaseline)
      .value("rate_based", ControllerKind::RateBased);

  py::class_<ControllerConfig>(m, "ControllerConfig")
      .def(py::init<>())
      .def_readwrite("kappa", &ControllerConfig::kappa)
      .def_readwrite("w_bps", &ControllerConfig::w_bps)
      .def_readwrite("a", &ControllerConfig::a)
      .def_readwrite("beta", &ControllerConfig::beta)
      .def_readwrite("tau", &ControllerConfig::tau)
      .def_readwrite("b_ref", &ControllerConfig::b_ref)
      .def_readwrite("b_low", &ControllerConfig::b_low)
      .def_readwrite("b_high", &ControllerConfig::b_high)
      .def_readwrite("max_horizon", &ControllerConfig::max_horizon)
      .def_readwrite("epsilon", &ControllerConfig::epsilon)
      .def_readwrite("bins", &ControllerConfig::bins)
      .def("validate", &ControllerConfig::validate);

  m.def("default_config", &default_config, py::arg("kind"));
  m.def("parse_controller_config", &parse_controller_config, py::arg("path"),
        py::arg("base") = ControllerConfig{});

  py::class_<ProbeState>(m, "ProbeState")
      .def(py::init<>())
      .def_readwrite("x_hat", &ProbeState::x_hat)
      .def_readwrite("y_hat", &ProbeState::y_hat)
      .def_readwrite("t_prev", &ProbeState::t_prev)
      .def_readwrite("x_tilde_prev", &ProbeState::x_tilde_prev)
      .def_readwrite("seeded", &ProbeState::seeded);

  py::class_<StepDecision>(m, "StepDecision")
      .def_readonly("bitrate_bps", &StepDecision::bitrate_bps)
      .def_readonly("level", &StepDecision::level)
      .def_readonly("target_interval_s", &StepDecision::target_interval_s)
      .def_readonly("x_hat", &StepDecision::x_hat)
      .def_readonly("y_hat", &StepDecision::y_hat)
      .def_readonly("b_offset", &StepDecision::b_offset);

  m.def("probe_update", &probe_update, py::arg("state"), py::arg("config"));
  m.def("ewma_update", &ewma_update, py::arg("state"), py::arg("x_hat_new"),
        py::arg("config"));
  m.def("select_cq", &select_cq, py::arg("state"), py::arg("b_prev"), py::arg("window"),
        py::arg("objective"), py::arg("config"));
  m.def("target_interval", &target_interval, py::arg("bitrate_bps"), py::arg("y_hat"),
        py::arg("b_prev"), py::arg("b_offset"), py::arg("horizon"), py::arg("config"));
  m.def("select_rate_based", &select_rate_based, py::arg("y_hat"), py::arg("step_levels"),
        py::arg("b_prev"), py::arg("config"));

  py::class_<SessionController>(m, "SessionController")
      .def(py::init<ControllerKind, ControllerConfig, Objective>(), py::arg("kind"),
           py::arg("config"), py::arg("objective"))
      .def("decide", &SessionController::decide, py::arg("b_prev"), py::arg("window"))
      .def("on_downloaded", &SessionController::on_downloaded, py::arg("throughput_bps"),
           py::arg("download_duration_s"))
      .def_property_readonly("state", &SessionController::state);

  py::class_<BandwidthTrace::Point>(m, "TracePoint")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("time_s"), py::arg("capacity_bps"))
      .def_readwrite("time_s", &BandwidthTrace::Point::time_s)
      .def_readwrite("capacity_bps", &BandwidthTrace::Point::capacity_bps);

  py::class_<BandwidthTrace>(m, "BandwidthTrace")
      .def(py::init<>())
      .def_readwrite("points", &BandwidthTrace::points)
      .def("capacity_at", &BandwidthTrace::capacity_at, py::arg("t"))
      .def("validate", &BandwidthTrace::validate);

  m.def("load_trace", &load_trace, py::arg("path"));
  m.def("parse_trace_inline", &parse_trace_inline, py::arg("text"));

  py::class_<ClientSession>(m, "ClientSession")
      .def(py::init([](ControllerKind kind, std::shared_ptr<SegmentLadder> ladder,
                       int start_segment) {
             return ClientSession{kind, std::move(ladder), start_segment};
           }),
           py::arg("controller"), py::arg("ladder"), py::arg("start_segment") = 0)
      .def_readwrite("controller", &ClientSession::controller)
      .def_readwrite("start_segment", &ClientSession::start_segment);

  py::class_<StepRecord>(m, "StepRecord")
      .def_readonly("wall_time", &StepRecord::wall_time)
      .def_readonly("segment_index", &StepRecord::segment_index)
      .def_readonly("level", &StepRecord::level)
      .def_readonly("bitrate_bps", &StepRecord::bitrate_bps)
      .def_readonly("quality", &StepRecord::quality)
      .def_readonly("buffer_after", &StepRecord::buffer_after)
      .def_readonly("x_hat", &StepRecord::x_hat)
      .def_readonly("y_hat", &StepRecord::y_hat)
      .def_readonly("t_hat", &StepRecord::t_hat)
      .def_readonly("t_actual", &StepRecord::t_actual)
      .def_readonly("b_offset", &StepRecord::b_offset);

  py::class_<StallEvent>(m, "StallEvent")
      .def_readonly("start_time", &StallEvent::start_time)
      .def_readonly("duration", &StallEvent::duration);

  py::class_<SummaryMetrics>(m, "SummaryMetrics")
      .def_readonly("mean_quality", &SummaryMetrics::mean_quality)
      .def_readonly("min_quality", &SummaryMetrics::min_quality)
      .def_readonly("quality_stddev", &SummaryMetrics::quality_stddev)
      .def_readonly("psnr_p5", &SummaryMetrics::psnr_p5)
      .def_readonly("avg_bitrate", &SummaryMetrics::avg_bitrate)
      .def_readonly("stall_count", &SummaryMetrics::stall_count)
      .def_readonly("stall_total", &SummaryMetrics::stall_total)
      .def_readonly("min_buffer", &SummaryMetrics::min_buffer)
      .def_readonly("max_buffer", &SummaryMetrics::max_buffer);

  py::class_<SimReport>(m, "SimReport")
      .def_readonly("steps", &SimReport::steps)
      .def_readonly("stalls", &SimReport::stalls)
      .def_readonly("playout_start_time", &SimReport::playout_start_time)
      .def_readonly("end_time", &SimReport::end_time)
      .def_readonly("min_buffer", &SimReport::min_buffer)
      .def_readonly("max_buffer", &SimReport::max_buffer)
      .def_readonly("summary", &SimReport::summary);

  py::class_<SimOptions>(m, "SimOptions")
      .def(py::init<>())
      .def_readwrite("playout_start_s", &SimOptions::playout_start_s);

  m.def("run_single", &run_single, py::arg("session"), py::arg("trace"),
        py::arg("objective"), py::arg("config"), py::arg("rng_seed") = 0,
        py::arg("options") = SimOptions{});
  m.def("run_shared", &run_shared, py::arg("sessions"), py::arg("trace"),
        py::arg("objective"), py::arg("config"), py::arg("rng_seed") = 0,
        py::arg("options") = SimOptions{});
  m.def("run_known_bandwidth", &run_known_bandwidth, py::arg("ladder"),
        py::arg("bandwidth_bps"), py::arg("config"), py::arg("max_horizon"),
        py::arg("objective"), py::arg("b_init"));
  m.def("compute_metrics", &compute_metrics, py::arg("report"), py::arg("convention"));
  m.def("write_report_csv", &write_report_csv, py::arg("report"), py::arg("path"));
  m.def("write_summary_csv", &write_summary_csv, py::arg("summary"), py::arg("path"));
}
