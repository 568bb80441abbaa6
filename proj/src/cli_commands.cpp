#include "t2ctc/cli_commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "t2ctc/type_reduction.hpp"

namespace t2ctc {
namespace {

std::filesystem::path apply_output_root(const std::filesystem::path& dir) {
  const char* root = std::getenv("T2CTC_OUTPUT_ROOT");
  if (root != nullptr && *root != '\0' && dir.is_relative()) {
    return std::filesystem::path(root) / dir;
  }
  return dir;
}

std::string snr_label(double snr_db) {
  if (std::isinf(snr_db)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", snr_db);
  return buf;
}

std::filesystem::path rulebase_dir_of(const RunConfig& cfg) {
  if (!cfg.rulebase_dir.empty()) return apply_output_root(cfg.rulebase_dir);
  return apply_output_root(cfg.output_dir) / "rulebases";
}

Trajectory make_trajectory(const RobotParams& plant, const RunConfig& cfg) {
  return helix_trajectory(plant, cfg.trajectory.rise_rate,
                          cfg.trajectory.tilt_radius, cfg.trajectory.period,
                          cfg.trajectory.duration, cfg.dt);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Data-sheet checkpoint: ball-screw lengths (0.1, 0.2, 0.05) m at rates
// (0.15, 0.12, 0.1) m/s, published mass matrix and gravity vector.
const Vec3 checkpoint_qa(0.1, 0.2, 0.05);
const Vec3 checkpoint_qdot(0.15, 0.12, 0.1);
Mat3 checkpoint_M() {
  Mat3 m;
  m << 10.0161, -0.5288, -0.6026, -0.5288, 9.2516, 0.0091, -0.6026, 0.0091,
      9.4782;
  return m;
}
const Vec3 checkpoint_G(87.1237, 85.6256, 87.1237);

GeneralizedCoords settle(const RobotParams& plant, const Vec3& qa) {
  GeneralizedCoords g = GeneralizedCoords::home(plant);
  for (double s : {0.25, 0.5, 0.75, 1.0}) {
    g = make_consistent(plant, (s * qa).eval(), g);
  }
  return g;
}

void print_mat(const char* name, const Mat3& m) {
  std::printf("%s =\n", name);
  for (int r = 0; r < 3; ++r) {
    std::printf("  % 12.6f % 12.6f % 12.6f\n", m(r, 0), m(r, 1), m(r, 2));
  }
}

struct SweepCell {
  ControllerKind controller;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
};

struct CellOutcome {
  double sse = 0.0;
  bool unstable = false;
  std::size_t unstable_step = 0;
  std::string error;
};

}  // namespace

RunConfig runconfig_from_json(const Json& j) {
  RunConfig cfg;
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");
  if (j.contains("robot")) cfg.robot = j["robot"].get<std::string>();
  if (j.contains("controllers")) {
    cfg.controllers.clear();
    for (const auto& c : j["controllers"]) {
      cfg.controllers.push_back(controller_from_name(c.get<std::string>()));
    }
  }
  if (j.contains("kp")) cfg.gains.kp = j["kp"].get<double>();
  if (j.contains("kv")) cfg.gains.kv = j["kv"].get<double>();
  if (j.contains("label_count")) {
    cfg.label_count = j["label_count"].get<std::size_t>();
  }
  if (j.contains("fou_width")) cfg.fou_width = j["fou_width"].get<double>();
  if (j.contains("snr_db")) {
    cfg.snr_list.clear();
    for (const auto& s : j["snr_db"]) cfg.snr_list.push_back(snr_from_json(s));
  }
  if (j.contains("seeds")) {
    cfg.seed_list.clear();
    for (const auto& s : j["seeds"]) {
      cfg.seed_list.push_back(s.get<std::uint64_t>());
    }
  }
  if (j.contains("trajectory")) {
    const auto& t = j["trajectory"];
    if (t.contains("rise_rate")) cfg.trajectory.rise_rate = t["rise_rate"];
    if (t.contains("tilt_radius")) cfg.trajectory.tilt_radius = t["tilt_radius"];
    if (t.contains("period")) cfg.trajectory.period = t["period"];
    if (t.contains("duration")) cfg.trajectory.duration = t["duration"];
  }
  if (j.contains("dt")) cfg.dt = j["dt"].get<double>();
  if (j.contains("noise_refresh_steps")) {
    cfg.noise_refresh_steps = j["noise_refresh_steps"].get<std::size_t>();
  }
  if (j.contains("output_dir")) {
    cfg.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("rulebase_dir")) {
    cfg.rulebase_dir = j["rulebase_dir"].get<std::string>();
  }
  if (j.contains("emit_traces")) cfg.emit_traces = j["emit_traces"].get<bool>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<std::size_t>();
  if (cfg.controllers.empty()) throw std::runtime_error("no controllers listed");
  if (cfg.snr_list.empty()) throw std::runtime_error("no SNR entries listed");
  if (cfg.seed_list.empty()) throw std::runtime_error("no seeds listed");
  if (cfg.dt <= 0.0) throw std::runtime_error("dt must be positive");
  return cfg;
}

Json runconfig_to_json(const RunConfig& cfg) {
  Json j;
  j["robot"] = cfg.robot;
  Json controllers = Json::array();
  for (auto kind : cfg.controllers) controllers.push_back(controller_name(kind));
  j["controllers"] = std::move(controllers);
  j["kp"] = cfg.gains.kp;
  j["kv"] = cfg.gains.kv;
  j["label_count"] = cfg.label_count;
  if (cfg.fou_width) j["fou_width"] = *cfg.fou_width;
  Json snrs = Json::array();
  for (double s : cfg.snr_list) snrs.push_back(snr_to_json(s));
  j["snr_db"] = std::move(snrs);
  j["seeds"] = cfg.seed_list;
  j["trajectory"] = {{"rise_rate", cfg.trajectory.rise_rate},
                     {"tilt_radius", cfg.trajectory.tilt_radius},
                     {"period", cfg.trajectory.period},
                     {"duration", cfg.trajectory.duration}};
  j["dt"] = cfg.dt;
  j["noise_refresh_steps"] = cfg.noise_refresh_steps;
  j["output_dir"] = cfg.output_dir.string();
  if (!cfg.rulebase_dir.empty()) j["rulebase_dir"] = cfg.rulebase_dir.string();
  j["emit_traces"] = cfg.emit_traces;
  j["workers"] = cfg.workers;
  return j;
}

RobotParams load_robot(const std::string& spec) {
  if (spec == "default") return RobotParams::defaults();
  return robot_params_from_json(load_json_file(spec));
}

int cmd_train(const RunConfig& cfg) {
  try {
    const RobotParams plant = load_robot(cfg.robot);
    const Trajectory traj = make_trajectory(plant, cfg);
    const TrainedEstimators trained =
        train_estimators(plant, traj, cfg.label_count);

    const auto out = apply_output_root(cfg.output_dir);
    std::filesystem::create_directories(out);
    save_estimators(trained.bank, rulebase_dir_of(cfg));
    save_json_file(out / "training_report.json",
                   training_report_to_json(trained.report));

    std::printf("trained %zu estimators on %zu samples (%zu labels, %zu cells max)\n",
                estimator_count, traj.size(), cfg.label_count,
                trained.report.cell_capacity);
    std::printf("%-5s %6s %9s %9s %13s %13s\n", "name", "rules", "used",
                "skipped", "rms_residual", "output_span");
    for (std::size_t i = 0; i < estimator_count; ++i) {
      std::printf("%-5s %6zu %9zu %9zu %13.6g %13.6g\n", estimator_names[i],
                  trained.report.rule_counts[i],
                  trained.report.per_element[i].used,
                  trained.report.per_element[i].skipped,
                  trained.report.rms_residual[i],
                  trained.report.output_span[i]);
    }
    std::printf("coverage: %s\n",
                trained.report.sparse_coverage ? "sparse" : "dense");
    std::printf("wrote %s\n", rulebase_dir_of(cfg).string().c_str());
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_simulate(const RunConfig& cfg) {
  try {
    const RobotParams plant = load_robot(cfg.robot);
    const Trajectory traj = make_trajectory(plant, cfg);

    const bool wants_fuzzy =
        std::any_of(cfg.controllers.begin(), cfg.controllers.end(),
                    [](ControllerKind k) {
                      return k == ControllerKind::fuzzy_t1 ||
                             k == ControllerKind::fuzzy_t2;
                    });
    EstimatorBank bank;
    if (wants_fuzzy) bank = load_estimators(rulebase_dir_of(cfg));

    const auto out = apply_output_root(cfg.output_dir);
    std::filesystem::create_directories(out);

    std::vector<SweepCell> cells;
    for (double snr : cfg.snr_list) {
      for (auto kind : cfg.controllers) {
        for (auto seed : cfg.seed_list) {
          cells.push_back(SweepCell{kind, snr, seed});
        }
      }
    }
    std::vector<CellOutcome> outcomes(cells.size());

    auto run_cell = [&](std::size_t i) {
      const SweepCell& cell = cells[i];
      try {
        SimConfig sim;
        sim.controller = cell.controller;
        sim.gains = cfg.gains;
        sim.noise = NoiseSpec{cell.snr_db, cell.seed};
        sim.fou_width = cfg.fou_width;
        if (cfg.noise_refresh_steps > 0) {
          sim.noise_refresh_steps = cfg.noise_refresh_steps;
        }
        sim.record_steps = cfg.emit_traces;
        const SimResult res =
            simulate(plant, traj, sim, wants_fuzzy ? &bank : nullptr);

        const std::string stem = "sim_" + controller_name(cell.controller) +
                                 "_snr" + snr_label(cell.snr_db) + "_seed" +
                                 std::to_string(cell.seed);
        save_json_file(out / (stem + ".json"),
                       summary_to_json(controller_name(cell.controller),
                                       cell.snr_db, cell.seed, res));
        if (cfg.emit_traces) {
          std::ofstream csv(out / (stem + ".csv"));
          write_trace_csv(csv, res.steps);
        }
        outcomes[i] =
            CellOutcome{res.sse, res.unstable, res.unstable_step, {}};
      } catch (const std::exception& e) {
        outcomes[i] = CellOutcome{0.0, false, 0, e.what()};
      }
    };

    const std::size_t workers =
        std::min(cells.size(),
                 cfg.workers > 0
                     ? cfg.workers
                     : std::max<std::size_t>(
                           1, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size();
             i = next.fetch_add(1)) {
          run_cell(i);
        }
      });
    }
    for (auto& th : pool) th.join();

    bool had_error = false;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!outcomes[i].error.empty()) {
        had_error = true;
        std::cerr << "error: " << controller_name(cells[i].controller)
                  << " snr=" << snr_label(cells[i].snr_db)
                  << " seed=" << cells[i].seed << ": " << outcomes[i].error
                  << '\n';
      } else if (outcomes[i].unstable) {
        std::printf("unstable: %s snr=%s seed=%llu at step %zu\n",
                    controller_name(cells[i].controller).c_str(),
                    snr_label(cells[i].snr_db).c_str(),
                    static_cast<unsigned long long>(cells[i].seed),
                    outcomes[i].unstable_step);
      }
    }

    // SSE table, one row per noise level, medians across seeds.
    std::printf("\n%-10s", "snr_db");
    for (auto kind : cfg.controllers) {
      std::printf(" %14s", controller_name(kind).c_str());
    }
    const bool ratio_col =
        std::count(cfg.controllers.begin(), cfg.controllers.end(),
                   ControllerKind::fuzzy_t1) > 0 &&
        std::count(cfg.controllers.begin(), cfg.controllers.end(),
                   ControllerKind::fuzzy_t2) > 0;
    if (ratio_col) std::printf(" %10s", "t1/t2");
    std::printf("\n");
    for (double snr : cfg.snr_list) {
      std::printf("%-10s", snr_label(snr).c_str());
      double t1_med = 0.0, t2_med = 0.0;
      for (auto kind : cfg.controllers) {
        std::vector<double> sses;
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (cells[i].controller == kind && cells[i].snr_db == snr &&
              outcomes[i].error.empty()) {
            sses.push_back(outcomes[i].sse);
          }
        }
        const double med = sses.empty() ? std::nan("") : median_of(sses);
        if (kind == ControllerKind::fuzzy_t1) t1_med = med;
        if (kind == ControllerKind::fuzzy_t2) t2_med = med;
        std::printf(" %14.6g", med);
      }
      if (ratio_col) std::printf(" %10.4f", t1_med / t2_med);
      std::printf("\n");
    }
    return had_error ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

namespace {

enum class OperandFamily { interval, gaussian, general };

OperandFamily classify(const GeneralizedCentroidInput& input) {
  bool all_interval = true, all_gaussian = true;
  auto visit = [&](const FuzzyNumberT1& f) {
    if (!std::holds_alternative<IntervalMF>(f.mf) &&
        !std::holds_alternative<SingletonMF>(f.mf)) {
      all_interval = false;
    }
    if (!std::holds_alternative<GaussianMF>(f.mf) &&
        !std::holds_alternative<SingletonMF>(f.mf)) {
      all_gaussian = false;
    }
  };
  for (const auto& v : input.values) visit(v);
  for (const auto& w : input.weights) visit(w);
  if (all_interval) return OperandFamily::interval;
  if (all_gaussian) return OperandFamily::gaussian;
  return OperandFamily::general;
}

void to_interval(const FuzzyNumberT1& f, double& center, double& spread) {
  if (const auto* i = std::get_if<IntervalMF>(&f.mf)) {
    center = 0.5 * (i->lo + i->hi);
    spread = 0.5 * (i->hi - i->lo);
  } else {
    center = std::get<SingletonMF>(f.mf).point;
    spread = 0.0;
  }
}

void print_quality(const TRQuality& q) {
  std::printf("quality: spread ratio %.4f%s\n", q.ratio,
              q.warning ? " (warning: linearization degraded)" : "");
}

void print_grid(const char* tag, const FuzzyNumberT1& f) {
  const Support sup = f.support();
  std::printf("%s: support [%.4f, %.4f], centroid %.4f\n", tag, sup.lo,
              sup.hi, centroid_defuzz(f));
}

}  // namespace

int cmd_reduce(const std::filesystem::path& input, const std::string& method,
               std::size_t grid_points) {
  try {
    if (method != "exact" && method != "approx" && method != "both") {
      throw std::runtime_error("--method must be exact, approx, or both");
    }
    const GeneralizedCentroidInput gc =
        centroid_input_from_json(load_json_file(input));
    const bool want_exact = method != "approx";
    const bool want_approx = method != "exact";

    switch (classify(gc)) {
      case OperandFamily::interval: {
        const std::size_t n = gc.values.size();
        std::vector<double> c(n), s(n), h(n), d(n);
        for (std::size_t i = 0; i < n; ++i) {
          to_interval(gc.values[i], c[i], s[i]);
          to_interval(gc.weights[i], h[i], d[i]);
        }
        KMResult km;
        ApproxGCIntervalResult ap;
        if (want_exact) {
          km = km_exact_interval(c, s, h, d);
          std::printf("exact: [%.4f, %.4f]%s (passes %d/%d)\n", km.y_l,
                      km.y_r, km.y_r - km.y_l <= 1e-12 ? " crisp" : "",
                      km.iters_l, km.iters_r);
        }
        if (want_approx) {
          ap = approx_gc_interval(c, s, h, d);
          std::printf("approx: [%.4f, %.4f]\n", ap.value.c - ap.value.s,
                      ap.value.c + ap.value.s);
          print_quality(ap.quality);
        }
        if (want_exact && want_approx) {
          std::printf("diff: left %.3e right %.3e\n",
                      std::abs(km.y_l - (ap.value.c - ap.value.s)),
                      std::abs(km.y_r - (ap.value.c + ap.value.s)));
        }
        break;
      }
      case OperandFamily::gaussian: {
        const std::size_t n = gc.values.size();
        std::vector<double> m(n), sg(n), h(n), d(n);
        for (std::size_t i = 0; i < n; ++i) {
          if (const auto* gm = std::get_if<GaussianMF>(&gc.values[i].mf)) {
            m[i] = gm->mean;
            sg[i] = gm->sigma;
          } else {
            m[i] = std::get<SingletonMF>(gc.values[i].mf).point;
            sg[i] = 0.0;
          }
          if (const auto* gw = std::get_if<GaussianMF>(&gc.weights[i].mf)) {
            h[i] = gw->mean;
            d[i] = gw->sigma;
          } else {
            h[i] = std::get<SingletonMF>(gc.weights[i].mf).point;
            d[i] = 0.0;
          }
        }
        FuzzyNumberT1 bf;
        ApproxGCGaussianResult ap;
        if (want_exact) {
          bf = cos_tr_bruteforce(gc, grid_points);
          print_grid("exact (enumerated)", bf);
        }
        if (want_approx) {
          ap = approx_gc_gaussian(m, sg, h, d, gc.tnorm);
          std::printf("approx: gaussian m %.4f sigma %.4f\n", ap.value.m,
                      ap.value.sigma);
          print_quality(ap.quality);
        }
        if (want_exact && want_approx) {
          std::printf("diff: centroid %.3e\n",
                      std::abs(centroid_defuzz(bf) - ap.value.m));
        }
        break;
      }
      case OperandFamily::general: {
        FuzzyNumberT1 bf;
        ApproxGCResult ap;
        if (want_exact) {
          bf = cos_tr_bruteforce(gc, grid_points);
          print_grid("exact (enumerated)", bf);
        }
        if (want_approx) {
          ap = approx_generalized_centroid(gc);
          print_grid("approx", ap.value);
          print_quality(ap.quality);
        }
        if (want_exact && want_approx) {
          std::printf("diff: centroid %.3e\n",
                      std::abs(centroid_defuzz(bf) -
                               centroid_defuzz(ap.value)));
        }
        break;
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_dynamics(const RunConfig& cfg, const std::vector<double>& qa,
                 const std::vector<double>& qdot, bool reference) {
  try {
    const RobotParams plant = load_robot(cfg.robot);
    Vec3 q = Vec3::Zero(), qd = Vec3::Zero();
    if (reference) {
      q = checkpoint_qa;
      qd = checkpoint_qdot;
    } else {
      if (qa.size() != 3) {
        throw std::runtime_error("--q needs exactly three actuator lengths");
      }
      q = Vec3(qa[0], qa[1], qa[2]);
      if (!qdot.empty()) {
        if (qdot.size() != 3) {
          throw std::runtime_error("--qdot needs exactly three rates");
        }
        qd = Vec3(qdot[0], qdot[1], qdot[2]);
      }
    }

    const GeneralizedCoords g = settle(plant, q);
    const DynamicTerms dt = assemble_MCG(plant, g, qd);
    std::printf("q = (%.6f, %.6f, %.6f), qdot = (%.6f, %.6f, %.6f)\n", q[0],
                q[1], q[2], qd[0], qd[1], qd[2]);
    print_mat("M", dt.M);
    print_mat("C", dt.C);
    std::printf("G = (%.6f, %.6f, %.6f)\n", dt.G[0], dt.G[1], dt.G[2]);
    std::printf("sum(G) = %.6f  (total weight %.6f)\n", dt.G.sum(),
                plant.total_mass() * plant.g);

    if (reference) {
      const Mat3 m_ref = checkpoint_M();
      std::printf("\ndata-sheet checkpoint comparison (10%% report)\n");
      int flagged = 0;
      for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col) {
          const double rel = std::abs(dt.M(r, col) - m_ref(r, col)) /
                             std::max(std::abs(m_ref(r, col)), 1.0);
          if (rel > 0.10) ++flagged;
          std::printf("M%d%d ref % 10.4f got % 10.4f rel %.4f%s\n", r + 1,
                      col + 1, m_ref(r, col), dt.M(r, col), rel,
                      rel > 0.10 ? " *" : "");
        }
      }
      for (int r = 0; r < 3; ++r) {
        const double rel =
            std::abs(dt.G[r] - checkpoint_G[r]) / std::abs(checkpoint_G[r]);
        if (rel > 0.10) ++flagged;
        std::printf("G%d  ref % 10.4f got % 10.4f rel %.4f%s\n", r + 1,
                    checkpoint_G[r], dt.G[r], rel, rel > 0.10 ? " *" : "");
      }
      std::printf("%d of 12 entries deviate beyond 10%%\n", flagged);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_benchmark(const RunConfig& cfg) {
  try {
    const RobotParams plant = load_robot(cfg.robot);
    const Trajectory traj = make_trajectory(plant, cfg);

    EstimatorBank bank;
    try {
      bank = load_estimators(rulebase_dir_of(cfg));
    } catch (const std::exception&) {
      std::printf("no stored rulebases, training first\n");
      bank = train_estimators(plant, traj, cfg.label_count).bank;
    }

    double snr = 10.0;
    for (double s : cfg.snr_list) {
      if (!std::isinf(s)) {
        snr = s;
        break;
      }
    }

    const std::array<ControllerKind, 4> kinds{
        ControllerKind::pd, ControllerKind::fuzzy_t1, ControllerKind::fuzzy_t2,
        ControllerKind::ctc};
    std::array<double, 4> mean{}, p99{};
    std::printf("%-10s %12s %12s\n", "controller", "mean_us", "p99_us");
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      SimConfig sim;
      sim.controller = kinds[i];
      sim.gains = cfg.gains;
      sim.noise = NoiseSpec{snr, cfg.seed_list.front()};
      sim.fou_width = cfg.fou_width;
      if (cfg.noise_refresh_steps > 0) {
        sim.noise_refresh_steps = cfg.noise_refresh_steps;
      }
      sim.record_steps = false;
      sim.record_timing = true;
      const SimResult res = simulate(plant, traj, sim, &bank);
      mean[i] = res.mean_loop_us();
      p99[i] = res.p99_loop_us();
      std::printf("%-10s %12.3f %12.3f\n",
                  controller_name(kinds[i]).c_str(), mean[i], p99[i]);
    }

    const bool ordered =
        mean[0] < mean[1] && mean[1] < mean[2] && mean[2] < mean[3];
    const double margin = mean[3] / mean[2];
    std::printf("ordering pd < fuzzy-t1 < fuzzy-t2 < ctc: %s\n",
                ordered ? "yes" : "NO");
    std::printf("ctc/t2 mean ratio: %.1f (want >= 10)\n", margin);
    return ordered && margin >= 10.0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_selftest() {
  int failures = 0;
  auto check = [&](bool ok, const char* what) {
    std::printf("%-52s %s\n", what, ok ? "ok" : "FAIL");
    if (!ok) ++failures;
  };

  // Trace CSV schema round trip, then a corrupted row must be rejected.
  {
    std::vector<SimStep> steps(3);
    for (std::size_t k = 0; k < steps.size(); ++k) {
      steps[k].t = 1e-3 * static_cast<double>(k);
      steps[k].qd = Vec3(0.1, 0.2, 0.3);
      steps[k].q = Vec3(0.1, 0.2, 0.3);
      steps[k].qdot_d = Vec3::Zero();
      steps[k].qdot = Vec3::Zero();
      steps[k].tau = Vec3(1, 2, 3);
      steps[k].loop_us = 5.0;
    }
    std::stringstream ss;
    write_trace_csv(ss, steps);
    bool ok = true;
    try {
      validate_trace_csv(ss);
    } catch (const std::exception&) {
      ok = false;
    }
    check(ok, "trace csv: written table validates");

    std::stringstream bad(ss.str() + "not,a,valid,row\n");
    bool rejected = false;
    try {
      validate_trace_csv(bad);
    } catch (const std::exception&) {
      rejected = true;
    }
    check(rejected, "trace csv: corrupt row rejected");
  }

  // Rule base serialization is stable byte for byte.
  {
    RuleBase rb;
    rb.inputs = {make_variable("x", -1.0, 1.0, 3),
                 make_variable("y", 0.0, 2.0, 3)};
    rb.output = "z";
    rb.out_lo = -5.0;
    rb.out_hi = 5.0;
    rb.rules = {Rule{{0, 1}, 0.5, 0.1}, Rule{{2, 0}, -1.25, 0.0}};
    const Json once = rulebase_to_json(rb);
    const RuleBase back = rulebase_from_json(once);
    check(once.dump() == rulebase_to_json(back).dump(),
          "rule base json: round trip byte-identical");
  }

  // Robot parameter serialization preserves the data sheet.
  {
    const RobotParams p = RobotParams::defaults();
    const RobotParams back = robot_params_from_json(robot_params_to_json(p));
    check(std::abs(back.total_mass() - p.total_mass()) == 0.0 &&
              back.d == p.d && back.h == p.h && back.g == p.g,
          "robot params json: round trip exact");
  }

  // Known interval reduction: centers (1,2,3), unit weights, spread 0.2.
  {
    const KMResult km = km_exact_interval({1, 2, 3}, {0, 0, 0}, {1, 1, 1},
                                          {0.2, 0.2, 0.2});
    check(std::abs(km.y_l - 13.0 / 7.0) <= 1e-12 &&
              std::abs(km.y_r - 15.0 / 7.0) <= 1e-12,
          "type reduction: [13/7, 15/7] checkpoint");
  }

  // Summary schema carries the sweep keys.
  {
    SimResult res;
    res.sse = 1.0;
    res.loop_us = {1.0, 2.0};
    const Json j = summary_to_json("pd", 10.0, 3, res);
    check(j.contains("schema") && j.contains("controller") &&
              j.contains("snr_db") && j.contains("seed") &&
              j.contains("sse") && j.contains("mean_loop_us") &&
              j.contains("p99_loop_us"),
          "summary json: schema keys present");
  }

  std::printf(failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace t2ctc
