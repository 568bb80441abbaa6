#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "t2ctc/control.hpp"
#include "t2ctc/io_formats.hpp"

namespace t2ctc {

struct TrajectoryParams {
  double rise_rate = 0.005;  // m/s of tool-tip climb
  double tilt_radius = 0.1;  // radians of tilt circle
  double period = 2.0;       // seconds per tilt revolution
  double duration = 10.0;    // seconds
};

// Shared settings for the train / simulate / benchmark commands. A JSON file
// provides the base values and command-line flags override single fields;
// cmd-specific notes live with each command.
struct RunConfig {
  std::string robot = "default";  // params file path or the built-in sheet
  std::vector<ControllerKind> controllers{
      ControllerKind::pd, ControllerKind::ctc, ControllerKind::fuzzy_t1,
      ControllerKind::fuzzy_t2};
  Gains gains;                  // zero means per-controller defaults
  std::size_t label_count = 5;  // membership functions per feature
  std::optional<double> fou_width;  // fixed band width; default tracks SNR
  std::vector<double> snr_list{std::numeric_limits<double>::infinity()};
  std::vector<std::uint64_t> seed_list{1};
  TrajectoryParams trajectory;
  double dt = 1e-3;
  std::size_t noise_refresh_steps = 0;  // 0 keeps the simulator default
  std::filesystem::path output_dir = "t2ctc-out";
  std::filesystem::path rulebase_dir;  // defaults to output_dir / "rulebases"
  bool emit_traces = false;
  std::size_t workers = 0;  // sweep parallelism; 0 = hardware concurrency
};

// Reads a config file and applies the T2CTC_OUTPUT_ROOT environment variable
// (relative output paths are placed under it). Throws std::runtime_error
// with the offending field on malformed input.
RunConfig runconfig_from_json(const Json& j);
Json runconfig_to_json(const RunConfig& cfg);

RobotParams load_robot(const std::string& spec);  // "default" or a file path

// Exit-code producing command bodies; the binary maps subcommands onto
// these. All print to stdout and report errors on stderr, returning 0 only
// when every step succeeded.
int cmd_train(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_reduce(const std::filesystem::path& input, const std::string& method,
               std::size_t grid_points);
int cmd_dynamics(const RunConfig& cfg, const std::vector<double>& qa,
                 const std::vector<double>& qdot, bool reference);
int cmd_benchmark(const RunConfig& cfg);
int cmd_selftest();

}  // namespace t2ctc
