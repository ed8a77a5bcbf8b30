#include "cq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "text.hpp"

namespace fs = std::filesystem;

namespace cq {

void ExperimentSpec::validate() const {
  if (controllers.empty()) throw ConfigError("spec lists no controllers");
  if (ladder_manifest.empty()) {
    if (ladder_segments < 1 || ladder_levels < 1 || ladder_bitrates_bps.empty())
      throw ConfigError("spec needs ladder.manifest or full ladder.* synthetic params");
  }
  if (trace_file.empty() && trace_inline.empty())
    throw ConfigError("spec needs trace.file or trace.inline");
  if (!sweep_param.empty()) {
    if (sweep_param != "BL" && sweep_param != "H")
      throw ConfigError("sweep.param must be BL or H");
    if (sweep_values.empty()) throw ConfigError("sweep.values is empty");
  }
  objective.validate();
}

Objective parse_objective(const std::string& textual) {
  if (textual == "maxmin") return Objective::max_min();
  const auto fields = text::split(textual, ',');
  std::optional<double> alpha;
  std::optional<double> delta;
  for (const std::string& f : fields) {
    const auto kv = text::split(f, ':');
    try {
      if (kv.size() == 2 && kv[0] == "alpha") {
        alpha = std::stod(kv[1]);
        continue;
      }
      if (kv.size() == 2 && kv[0] == "delta") {
        delta = std::stod(kv[1]);
        continue;
      }
    } catch (const std::exception&) {
    }
    throw ConfigError("cannot parse objective '" + textual +
                      "' (want maxmin | alpha:<a>[,delta:<d>])");
  }
  if (!alpha) throw ConfigError("objective '" + textual + "' is missing alpha");
  return Objective::alpha_fair(*alpha, delta);
}

namespace {

std::vector<double> parse_number_list(const std::string& value, const std::string& what) {
  std::vector<double> out;
  for (const std::string& part : text::split(value, '|')) {
    if (part.empty()) continue;
    try {
      out.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + part + "' in " + what);
    }
  }
  if (out.empty()) throw ConfigError(what + " is empty");
  return out;
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spec '" + path + "'");
  ExperimentSpec spec;
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
    const std::string value = line.substr(sep + 1);
    auto number = [&](const std::string& what) {
      try {
        return std::stod(value);
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": bad " + what);
      }
    };
    if (key == "scenario") spec.scenario = value;
    else if (key == "output.dir") spec.output_dir = value;
    else if (key == "objective") spec.objective = parse_objective(value);
    else if (key == "controllers") {
      for (const std::string& name : text::split(value, '|'))
        if (!name.empty()) spec.controllers.push_back(controller_kind_from_string(name));
    } else if (key == "ladder.manifest") spec.ladder_manifest = value;
    else if (key == "ladder.seed") spec.ladder_seed = static_cast<uint64_t>(number(key));
    else if (key == "ladder.segments") spec.ladder_segments = static_cast<int>(number(key));
    else if (key == "ladder.levels") spec.ladder_levels = static_cast<int>(number(key));
    else if (key == "ladder.tau") spec.ladder_tau = number(key);
    else if (key == "ladder.bitrates") spec.ladder_bitrates_bps = parse_number_list(value, key);
    else if (key == "ladder.theta") spec.profile.theta = number(key);
    else if (key == "ladder.gamma") spec.profile.gamma = number(key);
    else if (key == "ladder.sigma2_min") spec.profile.sigma2_min = number(key);
    else if (key == "ladder.sigma2_max") spec.profile.sigma2_max = number(key);
    else if (key == "ladder.scene_len") spec.profile.mean_scene_len = static_cast<int>(number(key));
    else if (key == "trace.file") spec.trace_file = value;
    else if (key == "trace.inline") spec.trace_inline = value;
    else if (key == "client.start") spec.client_starts.push_back(static_cast<int>(number(key)));
    else if (key == "config.file") spec.config_file = value;
    else if (key == "sim.playout_start") spec.sim.playout_start_s = number(key);
    else if (key == "sweep.param") spec.sweep_param = value;
    else if (key == "sweep.values") spec.sweep_values = parse_number_list(value, key);
    else if (key.rfind("config.", 0) == 0)
      spec.overrides.emplace_back(key.substr(7), number(key));
    else
      throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  spec.validate();
  return spec;
}

namespace {

struct OutputTracker {
  std::vector<std::string> written;

  std::ofstream open(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    written.push_back(path);
    return out;
  }
  void note(const std::string& path) { written.push_back(path); }
  void discard_all() {
    for (const std::string& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }
};

struct Aggregate {
  double mean_quality = 0;
  double min_quality = std::numeric_limits<double>::infinity();
  double quality_stddev = 0;
  double psnr_p5 = 0;
  int psnr_samples = 0;
  double avg_bitrate = 0;
  int stall_count = 0;
  double stall_total = 0;
  double min_buffer = std::numeric_limits<double>::infinity();
  double max_buffer = 0;
  int clients = 0;

  void add(const SummaryMetrics& m) {
    ++clients;
    mean_quality += m.mean_quality;
    min_quality = std::min(min_quality, m.min_quality);
    quality_stddev += m.quality_stddev;
    if (std::isfinite(m.psnr_p5)) {
      psnr_p5 += m.psnr_p5;
      ++psnr_samples;
    }
    avg_bitrate += m.avg_bitrate;
    stall_count += m.stall_count;
    stall_total += m.stall_total;
    min_buffer = std::min(min_buffer, m.min_buffer);
    max_buffer = std::max(max_buffer, m.max_buffer);
  }
};

ControllerConfig config_for(ControllerKind kind, const ExperimentSpec& spec, double tau) {
  ControllerConfig cfg = default_config(kind);
  cfg.tau = tau;
  if (!spec.config_file.empty()) cfg = parse_controller_config(spec.config_file, cfg);
  for (const auto& [key, value] : spec.overrides) apply_config_override(cfg, key, value);
  cfg.validate();
  return cfg;
}

SegmentLadder make_ladder(const ExperimentSpec& spec) {
  if (!spec.ladder_manifest.empty()) return load_manifest(spec.ladder_manifest);
  return gen_synthetic_ladder(spec.ladder_seed, spec.ladder_segments, spec.ladder_levels,
                              spec.ladder_tau, spec.ladder_bitrates_bps, spec.profile);
}

BandwidthTrace make_trace(const ExperimentSpec& spec) {
  if (!spec.trace_file.empty()) return load_trace(spec.trace_file);
  return parse_trace_inline(spec.trace_inline);
}

}  // namespace

std::vector<std::string> run_experiment(const ExperimentSpec& spec, std::ostream& log,
                                        bool parallel) {
  spec.validate();

  std::string out_dir = spec.output_dir;
  if (out_dir.empty()) {
    const char* env = std::getenv("CQ_OUTPUT_DIR");
    out_dir = env && *env ? env : ".";
  }
  fs::create_directories(out_dir);

  const auto ladder = std::make_shared<SegmentLadder>(make_ladder(spec));
  validate_objective_for(spec.objective, ladder->convention);
  const BandwidthTrace trace = make_trace(spec);
  const std::vector<int> starts =
      spec.client_starts.empty() ? std::vector<int>{0} : spec.client_starts;

  // one run per (controller [, sweep value]); runs are independent, so they
  // may execute concurrently, with all output written in job order
  struct Job {
    ControllerKind kind;
    double sweep_value = 0;
    std::vector<SimReport> reports;
  };
  std::vector<Job> jobs;
  for (ControllerKind kind : spec.controllers) {
    if (spec.sweep_param.empty()) jobs.push_back({kind, 0, {}});
    else
      for (double value : spec.sweep_values) jobs.push_back({kind, value, {}});
  }
  auto execute = [&](Job& job) {
    ControllerConfig cfg = config_for(job.kind, spec, ladder->tau);
    if (!spec.sweep_param.empty()) {
      apply_config_override(cfg, spec.sweep_param, job.sweep_value);
      cfg.validate();
    }
    std::vector<ClientSession> sessions;
    for (int s : starts) sessions.push_back({job.kind, ladder, s});
    job.reports = run_shared(sessions, trace, spec.objective, cfg, spec.ladder_seed, spec.sim);
  };
  if (parallel) {
    std::vector<std::future<void>> pending;
    pending.reserve(jobs.size());
    for (Job& job : jobs)
      pending.push_back(std::async(std::launch::async, [&execute, &job] { execute(job); }));
    for (auto& f : pending) f.get();
  } else {
    for (Job& job : jobs) execute(job);
  }

  OutputTracker outputs;
  try {
    if (!spec.sweep_param.empty()) {
      auto out = outputs.open(out_dir + "/" + spec.scenario + "_sweep.csv");
      out << "controller," << spec.sweep_param
          << ",psnr_p5,min_buffer_s,mean_quality,stall_total_s\n";
      for (const Job& job : jobs) {
        Aggregate agg;
        for (const SimReport& r : job.reports)
          if (!r.steps.empty()) agg.add(r.summary);
        out << to_string(job.kind) << "," << text::format_double(job.sweep_value) << ","
            << text::format_double(agg.psnr_samples ? agg.psnr_p5 / agg.psnr_samples
                                                    : std::nan(""))
            << "," << text::format_double(agg.min_buffer) << ","
            << text::format_double(agg.clients ? agg.mean_quality / agg.clients : 0) << ","
            << text::format_double(agg.stall_total) << "\n";
        log << spec.scenario << ": " << to_string(job.kind) << " " << spec.sweep_param
            << "=" << job.sweep_value << " done\n";
      }
    } else {
      auto comparison = outputs.open(out_dir + "/" + spec.scenario + "_comparison.csv");
      comparison << "controller,metric,value\n";
      for (const Job& job : jobs) {
        Aggregate agg;
        for (size_t i = 0; i < job.reports.size(); ++i) {
          const std::string stem = out_dir + "/" + spec.scenario + "_" +
                                   to_string(job.kind) + "_c" + std::to_string(i);
          write_report_csv(job.reports[i], stem + "_trace.csv");
          outputs.note(stem + "_trace.csv");
          write_summary_csv(job.reports[i].summary, stem + "_summary.csv");
          outputs.note(stem + "_summary.csv");
          if (!job.reports[i].steps.empty()) agg.add(job.reports[i].summary);
          log << spec.scenario << ": " << to_string(job.kind) << " client " << i << ": "
              << job.reports[i].steps.size() << " segments, "
              << job.reports[i].stalls.size() << " stalls\n";
        }
        auto metric = [&](const std::string& name, double v) {
          comparison << to_string(job.kind) << "," << name << ","
                     << text::format_double(v) << "\n";
        };
        metric("mean_quality", agg.clients ? agg.mean_quality / agg.clients : 0);
        metric("min_quality", agg.clients ? agg.min_quality : 0);
        metric("quality_stddev", agg.clients ? agg.quality_stddev / agg.clients : 0);
        if (agg.psnr_samples) metric("psnr_p5", agg.psnr_p5 / agg.psnr_samples);
        metric("avg_bitrate_bps", agg.clients ? agg.avg_bitrate / agg.clients : 0);
        metric("stall_count", agg.stall_count);
        metric("stall_total_s", agg.stall_total);
        metric("min_buffer_s", agg.clients ? agg.min_buffer : 0);
        metric("max_buffer_s", agg.max_buffer);
      }
    }
  } catch (...) {
    outputs.discard_all();
    throw;
  }
  return outputs.written;
}

int cmd_validate(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  try {
    const SegmentLadder ladder = load_manifest(manifest_path);
    out << "ok: " << ladder.num_segments() << " segments, " << ladder.num_levels()
        << " levels, tau=" << text::format_double(ladder.tau) << "s, quality="
        << to_string(ladder.convention) << "\n";
    return 0;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "invalid manifest: " << e.what() << "\n";
    return 1;
  }
}

int cmd_plan(const PlanCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    const SegmentLadder ladder = load_manifest(cmd.manifest_path);
    const Objective objective = parse_objective(cmd.objective);
    validate_objective_for(objective, ladder.convention);
    const int horizon = cmd.horizon > 0 ? cmd.horizon : ladder.num_segments();
    if (horizon > ladder.num_segments())
      throw ValidationError("horizon exceeds the segment count");

    PlanRequest request;
    request.b_init = cmd.b_init;
    request.b_final = cmd.b_final;
    request.grid = {cmd.b_low, cmd.b_high, cmd.bins};
    request.tau = ladder.tau;
    request.bandwidth_bps = cmd.bandwidth_bps;
    request.window = ladder.window(0, horizon);
    request.objective = objective;

    const PlanResult result = plan(request);
    out << "step,level,bitrate_bps,quality,buffer_after_s\n";
    for (int m = 0; m < horizon; ++m)
      out << (m + 1) << "," << result.levels[m] << ","
          << text::format_double(result.bitrates[m]) << ","
          << text::format_double(request.window[m][result.levels[m]].quality) << ","
          << text::format_double(result.trajectory[m + 1]) << "\n";
    out << "achieved_utility," << text::format_double(result.achieved_utility)
        << ",b_offset," << text::format_double(result.b_offset) << "\n";
    return 0;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_simulate(const std::string& spec_path, std::ostream& out, std::ostream& err,
                 bool parallel) {
  try {
    const ExperimentSpec spec = parse_experiment_spec(spec_path);
    const auto written = run_experiment(spec, out, parallel);
    for (const std::string& path : written) out << "wrote " << path << "\n";
    return 0;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_gen_ladder(const GenLadderCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    if (cmd.output_path.empty()) throw ConfigError("gen-ladder needs an output path");
    const SegmentLadder ladder =
        gen_synthetic_ladder(cmd.seed, cmd.segments, cmd.levels, cmd.tau,
                             cmd.bitrates_bps, cmd.profile);
    write_manifest(ladder, cmd.output_path);
    out << "wrote " << cmd.output_path << ": " << ladder.num_segments() << " segments, "
        << ladder.num_levels() << " levels, tau=" << text::format_double(ladder.tau)
        << "s\n";
    return 0;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cq
