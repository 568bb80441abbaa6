#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "t2ctc/cli_commands.hpp"
#include "t2ctc/io_formats.hpp"

namespace py = pybind11;
using namespace t2ctc;

namespace {

GeneralizedCoords settle(const RobotParams& p, const Vec3& qa) {
  GeneralizedCoords g = GeneralizedCoords::home(p);
  for (double s : {0.25, 0.5, 0.75, 1.0}) {
    g = make_consistent(p, (s * qa).eval(), g);
  }
  return g;
}

std::vector<std::vector<double>> to_rows(const Mat3& m) {
  std::vector<std::vector<double>> rows(3, std::vector<double>(3));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rows[r][c] = m(r, c);
  return rows;
}

TNormKind tnorm_of(const std::string& name) {
  if (name == "product") return TNormKind::product;
  if (name == "min" || name == "minimum") return TNormKind::minimum;
  throw std::invalid_argument("tnorm must be 'product' or 'minimum'");
}

}  // namespace

PYBIND11_MODULE(t2ctc, m) {
  m.doc() =
      "interval type-2 fuzzy sets, Karnik-Mendel type reduction, and the "
      "fuzzy computed-torque manipulator simulation";

  m.def(
      "km_reduce",
      [](const std::vector<double>& c, const std::vector<double>& s,
         const std::vector<double>& h, const std::vector<double>& d) {
        const KMResult r = km_exact_interval(c, s, h, d);
        return py::make_tuple(r.y_l, r.y_r);
      },
      py::arg("centers"), py::arg("spreads"), py::arg("weights"),
      py::arg("weight_spreads"),
      "Exact type-reduced interval of a weighted average with interval "
      "values [c-s, c+s] and interval weights [h-d, h+d].");

  m.def(
      "approx_reduce",
      [](const std::vector<double>& c, const std::vector<double>& s,
         const std::vector<double>& h, const std::vector<double>& d) {
        const auto r = approx_gc_interval(c, s, h, d);
        py::dict out;
        out["lo"] = r.value.c - r.value.s;
        out["hi"] = r.value.c + r.value.s;
        out["spread_ratio"] = r.quality.ratio;
        out["warning"] = r.quality.warning;
        return out;
      },
      py::arg("centers"), py::arg("spreads"), py::arg("weights"),
      py::arg("weight_spreads"),
      "First-order generalized-centroid approximation of the same average, "
      "with its validity diagnostics.");

  m.def(
      "affine_interval",
      [](const std::vector<double>& c, const std::vector<double>& s,
         const std::vector<double>& alphas, double beta) {
        std::vector<IntervalT1> sets(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) sets[i] = {c[i], s[i]};
        const IntervalT1 r = affine_combine_interval(sets, alphas, beta);
        return py::make_tuple(r.c - r.s, r.c + r.s);
      },
      py::arg("centers"), py::arg("spreads"), py::arg("alphas"),
      py::arg("beta") = 0.0,
      "Support of sum_i alpha_i X_i + beta for interval fuzzy numbers.");

  m.def(
      "affine_gaussian",
      [](const std::vector<double>& means, const std::vector<double>& sigmas,
         const std::vector<double>& alphas, double beta,
         const std::string& tnorm) {
        std::vector<GaussianT1> sets(means.size());
        for (std::size_t i = 0; i < means.size(); ++i)
          sets[i] = {means[i], sigmas[i]};
        const GaussianT1 r =
            affine_combine_gaussian(sets, alphas, beta, tnorm_of(tnorm));
        return py::make_tuple(r.m, r.sigma);
      },
      py::arg("means"), py::arg("sigmas"), py::arg("alphas"),
      py::arg("beta") = 0.0, py::arg("tnorm") = "product",
      "Mean and width of sum_i alpha_i X_i + beta for gaussian fuzzy "
      "numbers.");

  m.def(
      "join_gaussians",
      [](const std::vector<double>& means, const std::vector<double>& sigmas,
         const std::string& tnorm, std::size_t samples) {
        std::vector<MembershipFunctionT1> mfs;
        for (std::size_t i = 0; i < means.size(); ++i)
          mfs.push_back(GaussianMF{means[i], sigmas[i]});
        std::sort(mfs.begin(), mfs.end(),
                  [](const MembershipFunctionT1& a,
                     const MembershipFunctionT1& b) {
                    return peak_left(a) < peak_left(b);
                  });
        const FuzzyNumberT1 r =
            join_closed_convex(mfs, tnorm_of(tnorm), samples);
        const auto& s = std::get<SampledMF>(r.mf);
        return py::make_tuple(s.domain, s.grades);
      },
      py::arg("means"), py::arg("sigmas"), py::arg("tnorm") = "minimum",
      py::arg("samples") = 801,
      "Sampled membership curve of the join of gaussian grade sets.");

  m.def(
      "fou_width_for_snr", &fou_width_for_snr, py::arg("snr_db"),
      "Width of the uncertain-mean band applied to trained labels at a "
      "given noise level.");

  m.def(
      "load_rulebase",
      [](const std::filesystem::path& path) {
        return rulebase_from_json(load_json_file(path));
      },
      py::arg("path"), "Reads one stored rule base.");

  m.def(
      "infer_crisp",
      [](const RuleBase& rb, const std::vector<double>& x) {
        return infer_t1(downgrade_to_t1(rb), x);
      },
      py::arg("rulebase"), py::arg("x"),
      "Type-1 inference: every uncertain band collapsed to its midpoint.");

  m.def(
      "infer_interval",
      [](const RuleBase& rb, const std::vector<double>& x) {
        const IntervalT1 r = infer_it2_cos(rb, x);
        return py::make_tuple(r.c - r.s, r.c + r.s);
      },
      py::arg("rulebase"), py::arg("x"),
      "Interval type-2 center-of-sets inference via Karnik-Mendel.");

  m.def(
      "widen",
      [](const RuleBase& rb, double rho) { return apply_fou(rb, rho); },
      py::arg("rulebase"), py::arg("rho"),
      "Applies an uncertain-mean band of rho label widths.");

  py::class_<RuleBase>(m, "RuleBase")
      .def_property_readonly("rule_count",
                             [](const RuleBase& rb) { return rb.rules.size(); })
      .def_property_readonly(
          "input_count", [](const RuleBase& rb) { return rb.inputs.size(); })
      .def_property_readonly("output_range", [](const RuleBase& rb) {
        return py::make_tuple(rb.out_lo, rb.out_hi);
      });

  m.def(
      "dynamic_terms",
      [](const std::vector<double>& qa, const std::vector<double>& qdot) {
        if (qa.size() != 3 || qdot.size() != 3)
          throw std::invalid_argument("qa and qdot need three entries");
        const RobotParams p = RobotParams::defaults();
        const GeneralizedCoords g = settle(p, Vec3(qa[0], qa[1], qa[2]));
        const DynamicTerms t =
            assemble_MCG(p, g, Vec3(qdot[0], qdot[1], qdot[2]));
        py::dict out;
        out["M"] = to_rows(t.M);
        out["C"] = to_rows(t.C);
        out["G"] = std::vector<double>{t.G[0], t.G[1], t.G[2]};
        return out;
      },
      py::arg("qa"), py::arg("qdot"),
      "Mass matrix, Coriolis matrix, and gravity vector at the given "
      "actuator state of the built-in manipulator.");

  m.def(
      "train",
      [](const std::filesystem::path& dir, double duration,
         std::size_t labels, double tilt) {
        RunConfig cfg;
        cfg.trajectory.duration = duration;
        cfg.trajectory.tilt_radius = tilt;
        cfg.label_count = labels;
        const RobotParams p = RobotParams::defaults();
        const Trajectory traj = helix_trajectory(
            p, cfg.trajectory.rise_rate, tilt, cfg.trajectory.period,
            duration, cfg.dt);
        const TrainedEstimators trained = train_estimators(p, traj, labels);
        save_estimators(trained.bank, dir);
        py::dict out;
        std::vector<std::size_t> counts(trained.report.rule_counts.begin(),
                                        trained.report.rule_counts.end());
        out["rule_counts"] = counts;
        out["sparse_coverage"] = trained.report.sparse_coverage;
        return out;
      },
      py::arg("dir"), py::arg("duration") = 4.0, py::arg("labels") = 5,
      py::arg("tilt") = 0.1,
      "Learns the eighteen dynamic-term estimators along a helix and stores "
      "them under dir.");

  m.def(
      "simulate_sse",
      [](const std::string& controller, double snr_db, std::uint64_t seed,
         double duration, double tilt,
         const std::optional<std::filesystem::path>& rulebase_dir) {
        const RobotParams p = RobotParams::defaults();
        const Trajectory traj = helix_trajectory(p, 0.005, tilt, 2.0,
                                                 duration);
        SimConfig cfg;
        cfg.controller = controller_from_name(controller);
        cfg.noise = NoiseSpec{snr_db, seed};
        cfg.record_steps = false;
        cfg.record_timing = false;
        const bool fuzzy = cfg.controller == ControllerKind::fuzzy_t1 ||
                           cfg.controller == ControllerKind::fuzzy_t2;
        EstimatorBank bank;
        if (fuzzy) {
          if (rulebase_dir) {
            bank = load_estimators(*rulebase_dir);
          } else {
            bank = train_estimators(p, traj).bank;
          }
        }
        const SimResult r = simulate(p, traj, cfg, fuzzy ? &bank : nullptr);
        py::dict out;
        out["sse"] = r.sse;
        out["unstable"] = r.unstable;
        out["held_steps"] = r.held_steps;
        return out;
      },
      py::arg("controller"), py::arg("snr_db") = double(INFINITY),
      py::arg("seed") = 1, py::arg("duration") = 2.0, py::arg("tilt") = 0.1,
      py::arg("rulebase_dir") = std::nullopt,
      "Closed-loop tracking cost for one controller at one noise level. "
      "Fuzzy controllers train on the fly when no stored rule bases are "
      "given.");
}
