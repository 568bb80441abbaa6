#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "t2ctc/cli_commands.hpp"

namespace {

double parse_snr(const std::string& s) {
  if (s == "inf" || s == "INF" || s == "Inf") {
    return std::numeric_limits<double>::infinity();
  }
  const double v = std::stod(s);
  if (v <= 0.0) throw CLI::ValidationError("--snr entries must be positive");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interval type-2 fuzzy computed-torque simulation stack"};
  app.require_subcommand(1);

  std::string config_path;
  std::string robot = "default";
  std::string output_dir;
  std::string rulebase_dir;
  std::size_t workers = 0;
  app.add_option("--config", config_path, "JSON run configuration file");
  auto* opt_robot =
      app.add_option("--robot", robot, "robot params JSON or 'default'");
  auto* opt_out = app.add_option("--output-dir", output_dir,
                                 "output directory (under T2CTC_OUTPUT_ROOT "
                                 "when that is set and the path is relative)");
  auto* opt_rb = app.add_option("--rulebase-dir", rulebase_dir,
                                "rule base directory (default output/rulebases)");
  auto* opt_workers =
      app.add_option("--workers", workers, "sweep threads, 0 = all cores");

  std::size_t labels = 0;
  double duration = 0.0, dt = 0.0, tilt = -1.0, period = 0.0, rise = -1.0;
  double fou = -1.0, kp = 0.0, kv = 0.0;
  std::size_t hold = 0;
  std::vector<std::string> snr_args;
  std::vector<std::uint64_t> seed_args;
  std::vector<std::string> controller_args;
  bool emit_traces = false;

  auto add_traj_flags = [&](CLI::App* cmd) {
    cmd->add_option("--duration", duration, "trajectory seconds");
    cmd->add_option("--dt", dt, "control period seconds");
    cmd->add_option("--tilt", tilt, "tilt circle radius, radians");
    cmd->add_option("--period", period, "tilt revolution period, seconds");
    cmd->add_option("--rise", rise, "climb rate, m/s");
  };
  auto add_noise_flags = [&](CLI::App* cmd) {
    cmd->add_option("--snr", snr_args, "SNR list in dB, 'inf' allowed");
    cmd->add_option("--seeds", seed_args, "noise seed list");
    cmd->add_option("--fou", fou, "fixed FOU band width (default tracks SNR)");
    cmd->add_option("--hold", hold, "control steps between measurement draws");
  };

  CLI::App* train = app.add_subcommand("train", "record a computed-torque run "
                                                "and learn the estimators");
  train->add_option("--labels", labels, "membership functions per feature");
  add_traj_flags(train);

  CLI::App* simulate =
      app.add_subcommand("simulate", "closed-loop sweep over controllers, "
                                     "noise levels, and seeds");
  simulate->add_option("--controllers", controller_args,
                       "subset of pd, ctc, fuzzy-t1, fuzzy-t2");
  simulate->add_flag("--emit-traces", emit_traces, "write per-step CSV");
  simulate->add_option("--kp", kp, "servo stiffness override");
  simulate->add_option("--kv", kv, "servo damping override");
  add_noise_flags(simulate);
  add_traj_flags(simulate);

  CLI::App* reduce =
      app.add_subcommand("reduce", "type-reduce a generalized centroid input");
  std::string reduce_input;
  std::string method = "both";
  std::size_t grid_points = 33;
  reduce->add_option("input", reduce_input, "JSON input file")->required();
  reduce->add_option("--method", method, "exact, approx, or both");
  reduce->add_option("--points", grid_points,
                     "points per operand for the enumerated reference");

  CLI::App* dynamics =
      app.add_subcommand("dynamics", "assemble and print M, C, G");
  std::vector<double> q_arg, qdot_arg;
  bool reference = false;
  dynamics->add_option("--q", q_arg, "three actuator lengths")->expected(3);
  dynamics->add_option("--qdot", qdot_arg, "three actuator rates")->expected(3);
  dynamics->add_flag("--reference", reference,
                     "compare the data-sheet checkpoint configuration");

  CLI::App* benchmark =
      app.add_subcommand("benchmark", "per-controller loop timing");
  add_noise_flags(benchmark);
  add_traj_flags(benchmark);

  app.add_subcommand("selftest", "validate file formats and checkpoints");

  CLI11_PARSE(app, argc, argv);

  try {
    t2ctc::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = t2ctc::runconfig_from_json(t2ctc::load_json_file(config_path));
    }
    if (opt_robot->count() > 0) cfg.robot = robot;
    if (opt_out->count() > 0) cfg.output_dir = output_dir;
    if (opt_rb->count() > 0) cfg.rulebase_dir = rulebase_dir;
    if (opt_workers->count() > 0) cfg.workers = workers;
    if (labels > 0) cfg.label_count = labels;
    if (duration > 0.0) cfg.trajectory.duration = duration;
    if (dt > 0.0) cfg.dt = dt;
    if (tilt >= 0.0) cfg.trajectory.tilt_radius = tilt;
    if (period > 0.0) cfg.trajectory.period = period;
    if (rise >= 0.0) cfg.trajectory.rise_rate = rise;
    if (fou >= 0.0) cfg.fou_width = fou;
    if (hold > 0) cfg.noise_refresh_steps = hold;
    if (kp > 0.0) cfg.gains.kp = kp;
    if (kv > 0.0) cfg.gains.kv = kv;
    if (!snr_args.empty()) {
      cfg.snr_list.clear();
      for (const auto& s : snr_args) cfg.snr_list.push_back(parse_snr(s));
    }
    if (!seed_args.empty()) cfg.seed_list = seed_args;
    if (!controller_args.empty()) {
      cfg.controllers.clear();
      for (const auto& c : controller_args) {
        cfg.controllers.push_back(t2ctc::controller_from_name(c));
      }
    }
    if (emit_traces) cfg.emit_traces = true;

    if (train->parsed()) return t2ctc::cmd_train(cfg);
    if (simulate->parsed()) return t2ctc::cmd_simulate(cfg);
    if (reduce->parsed()) {
      return t2ctc::cmd_reduce(reduce_input, method, grid_points);
    }
    if (dynamics->parsed()) {
      return t2ctc::cmd_dynamics(cfg, q_arg, qdot_arg, reference);
    }
    if (benchmark->parsed()) return t2ctc::cmd_benchmark(cfg);
    return t2ctc::cmd_selftest();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
