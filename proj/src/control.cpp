#include "t2ctc/control.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace t2ctc {

namespace {

double gaussian_draw(std::mt19937_64& rng, std::optional<double>& spare) {
  if (spare) {
    const double v = *spare;
    spare.reset();
    return v;
  }
  // Box-Muller on 53-bit uniforms; u1 is kept away from zero for the log.
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
  const double u2 = static_cast<double>(rng() >> 11) * 0x1p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare = r * std::sin(a);
  return r * std::cos(a);
}

struct LoopState {
  GeneralizedCoords g;
  Vec3 qdot = Vec3::Zero();
};

// One control period under zero-order-hold torque; the passive coordinates
// are re-solved at every stage.
LoopState rk4_step(const RobotParams& p, const LoopState& s, const Vec3& tau,
                   double dt) {
  const auto deriv = [&](const Vec3& qa, const Vec3& qd,
                         const GeneralizedCoords& warm) {
    const GeneralizedCoords g = make_consistent(p, qa, warm);
    return std::pair(qd, forward_dynamics(p, g, qd, tau));
  };
  const Vec3 qa = s.g.qa();
  const auto [k1q, k1v] = deriv(qa, s.qdot, s.g);
  const auto [k2q, k2v] = deriv(qa + dt / 2 * k1q, s.qdot + dt / 2 * k1v, s.g);
  const auto [k3q, k3v] = deriv(qa + dt / 2 * k2q, s.qdot + dt / 2 * k2v, s.g);
  const auto [k4q, k4v] = deriv(qa + dt * k3q, s.qdot + dt * k3v, s.g);
  LoopState out;
  out.g = make_consistent(p, qa + dt / 6 * (k1q + 2 * k2q + 2 * k3q + k4q), s.g);
  out.qdot = s.qdot + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
  return out;
}

// Three-point binomial pass; endpoints kept.
void smooth(std::vector<Vec3>& v) {
  if (v.size() < 3) return;
  Vec3 prev = v[0];
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    const Vec3 cur = v[k];
    v[k] = 0.25 * prev + 0.5 * cur + 0.25 * v[k + 1];
    prev = cur;
  }
}

constexpr int m_slot[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};

IntervalT1 get_element(const FuzzyDynamicTerms& t, std::size_t i) {
  if (i < 6) return t.M[m_slot[i][0]][m_slot[i][1]];
  if (i < 15) return t.C[(i - 6) / 3][(i - 6) % 3];
  return t.G[i - 15];
}

void set_element(FuzzyDynamicTerms& t, std::size_t i, const IntervalT1& v) {
  if (i < 6) {
    t.M[m_slot[i][0]][m_slot[i][1]] = v;
    t.M[m_slot[i][1]][m_slot[i][0]] = v;
  } else if (i < 15) {
    t.C[(i - 6) / 3][(i - 6) % 3] = v;
  } else {
    t.G[i - 15] = v;
  }
}

// Center-of-sets reduction of one base against a shared grade table. Rules
// firing below 1e-9 of the strongest contribute less than the servo
// resolution and are dropped to keep the reduction small; scratch buffers are
// reused across calls.
IntervalT1 reduce_element(const RuleBase& rb, const GradeTable& grades) {
  thread_local std::vector<std::array<double, 2>> firing;
  firing.resize(rb.rules.size());
  const bool product = rb.tnorm == TNormKind::product;
  double best = 0.0;
  for (std::size_t r = 0; r < rb.rules.size(); ++r) {
    double lo = 1.0, hi = 1.0;
    for (std::size_t v = 0; v < rb.inputs.size(); ++v) {
      const auto& g = grades[v][rb.rules[r].antecedent[v]];
      if (product) {
        lo *= g[0];
        hi *= g[1];
      } else {
        lo = std::min(lo, g[0]);
        hi = std::min(hi, g[1]);
      }
    }
    firing[r] = {lo, hi};
    best = std::max(best, hi);
  }
  if (best <= 0.0) throw std::domain_error("no rule fired");
  const double cut = 1e-9 * best;
  thread_local std::vector<double> c, s, h, d;
  c.clear();
  s.clear();
  h.clear();
  d.clear();
  for (std::size_t r = 0; r < firing.size(); ++r) {
    if (firing[r][1] < cut) continue;
    c.push_back(rb.rules[r].c);
    s.push_back(rb.rules[r].s);
    h.push_back((firing[r][0] + firing[r][1]) / 2.0);
    d.push_back((firing[r][1] - firing[r][0]) / 2.0);
  }
  return km_reduce_interval(c, s, h, d);
}

double channel_variance(const std::vector<Vec3>& samples, int channel) {
  double mean = 0.0;
  for (const Vec3& v : samples) mean += v[channel];
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (const Vec3& v : samples) {
    const double d = v[channel] - mean;
    var += d * d;
  }
  return var / static_cast<double>(samples.size());
}

}  // namespace

Gains Gains::critically_damped(double kp) {
  if (kp <= 0.0) throw std::invalid_argument("kp must be positive");
  return {kp, 2.0 * std::sqrt(kp)};
}

void Gains::validate() const {
  if (kp <= 0.0 || kv < 0.0 || !std::isfinite(kp) || !std::isfinite(kv))
    throw std::invalid_argument("invalid servo gains");
}

Eigen::VectorXd inject_noise(const Eigen::VectorXd& values,
                             const NoiseSpec& spec, double reference_power) {
  if (reference_power < 0.0)
    throw std::invalid_argument("reference power must be nonnegative");
  if (std::isinf(spec.snr_db)) return values;
  const double sigma =
      std::sqrt(reference_power / std::pow(10.0, spec.snr_db / 10.0));
  std::mt19937_64 rng(spec.seed);
  std::optional<double> spare;
  Eigen::VectorXd out = values;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] += sigma * gaussian_draw(rng, spare);
  return out;
}

NoiseStream::NoiseStream(const NoiseSpec& spec, Eigen::VectorXd channel_power)
    : enabled_(!std::isinf(spec.snr_db)), rng_(spec.seed) {
  if ((channel_power.array() < 0.0).any())
    throw std::invalid_argument("reference power must be nonnegative");
  if (enabled_)
    sigma_ = (channel_power / std::pow(10.0, spec.snr_db / 10.0)).cwiseSqrt();
}

Eigen::VectorXd NoiseStream::apply(const Eigen::VectorXd& clean) {
  if (!enabled_) return clean;
  if (clean.size() != sigma_.size())
    throw std::invalid_argument("channel count mismatch");
  Eigen::VectorXd out = clean;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] += sigma_[i] * gaussian_draw(rng_, spare_);
  return out;
}

void Trajectory::validate() const {
  if (q.size() != qdot.size() || q.size() != qddot.size())
    throw std::invalid_argument("trajectory arrays disagree in length");
  if (dt <= 0.0) throw std::invalid_argument("trajectory step must be positive");
  if (q.size() < 3) return;
  double scale = 1e-9;
  for (const Vec3& v : qdot) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  for (std::size_t k = 1; k + 1 < q.size(); ++k) {
    const Vec3 fd = (q[k + 1] - q[k - 1]) / (2.0 * dt);
    if ((fd - qdot[k]).cwiseAbs().maxCoeff() > 1e-3 * scale)
      throw std::invalid_argument(
          "trajectory rates do not match the sampled positions");
  }
}

Trajectory helix_trajectory(const RobotParams& p, double rise_rate,
                            double tilt_radius, double period, double duration,
                            double dt) {
  if (dt <= 0.0 || duration <= 0.0 || period <= 0.0)
    throw std::invalid_argument("helix timing parameters must be positive");
  const std::size_t n = static_cast<std::size_t>(std::llround(duration / dt)) + 1;
  const double omega = 2.0 * std::numbers::pi / period;
  Trajectory traj;
  traj.dt = dt;
  traj.q.reserve(n);
  GeneralizedCoords warm = GeneralizedCoords::home(p);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const ToolPose pose{p.h + rise_rate * t, tilt_radius * std::cos(omega * t),
                        tilt_radius * std::sin(omega * t)};
    warm = inverse_kinematics(p, pose, warm);
    traj.q.push_back(warm.qa());
  }
  traj.qdot.resize(n);
  traj.qddot.resize(n);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    traj.qdot[k] = (traj.q[k + 1] - traj.q[k - 1]) / (2.0 * dt);
    traj.qddot[k] = (traj.q[k + 1] - 2.0 * traj.q[k] + traj.q[k - 1]) / (dt * dt);
  }
  traj.qdot[0] = (-3.0 * traj.q[0] + 4.0 * traj.q[1] - traj.q[2]) / (2.0 * dt);
  traj.qdot[n - 1] =
      (3.0 * traj.q[n - 1] - 4.0 * traj.q[n - 2] + traj.q[n - 3]) / (2.0 * dt);
  traj.qddot[0] = traj.qddot[1];
  traj.qddot[n - 1] = traj.qddot[n - 2];
  smooth(traj.qdot);
  smooth(traj.qddot);
  return traj;
}

Vec4 features(const Vec3& qa, const Vec3& qdot_a) {
  return Vec4(qa[0] - qa[1], qa[0] - qa[2], qdot_a[0] - qdot_a[1],
              qdot_a[0] - qdot_a[2]);
}

Vec3 pd_control(const Gains& g, const Vec3& qd, const Vec3& qdot_d,
                const Vec3& q, const Vec3& qdot) {
  return g.kp * (qd - q) + g.kv * (qdot_d - qdot);
}

Vec3 ctc_control(const Gains& g, const RobotParams& model,
                 const GeneralizedCoords& q, const Vec3& qdot, const Vec3& qd,
                 const Vec3& qdot_d, const Vec3& qddot_d) {
  const Vec3 fprime =
      qddot_d + g.kv * (qdot_d - qdot) + g.kp * (qd - q.qa());
  const DynamicTerms t = assemble_MCG(model, q, qdot);
  return t.M * fprime + t.C * qdot + t.G;
}

DynamicTerms FuzzyDynamicTerms::centers() const {
  DynamicTerms t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      t.M(i, j) = M[i][j].c;
      t.C(i, j) = C[i][j].c;
    }
    t.G[i] = G[i].c;
  }
  return t;
}

FuzzyDynamicTerms estimate_fuzzy_terms(const EstimatorBank& estimators,
                                       const Vec4& feats, EstimatorMode mode,
                                       const FuzzyDynamicTerms* last) {
  const std::vector<double> x{feats[0], feats[1], feats[2], feats[3]};
  // All banks are trained over the same four variables, so one grade table
  // serves every element.
  GradeTableT1 center_grades;
  GradeTable bound_grades;
  if (mode == EstimatorMode::t1)
    center_grades = label_grades_t1(estimators[0].inputs, x);
  else
    bound_grades = label_grades(estimators[0].inputs, x);
  FuzzyDynamicTerms out;
  for (std::size_t i = 0; i < estimator_count; ++i) {
    IntervalT1 v;
    try {
      if (mode == EstimatorMode::t1)
        v = IntervalT1{infer_t1_cached(estimators[i], center_grades), 0.0};
      else
        v = reduce_element(estimators[i], bound_grades);
    } catch (const std::domain_error&) {
      if (last == nullptr) throw;
      v = get_element(*last, i);
      out.held[i] = true;
      out.any_held = true;
    }
    set_element(out, i, v);
  }
  return out;
}

Vec3 fuzzy_torque(const FuzzyDynamicTerms& est, const Vec3& fprime,
                  const Vec3& qdot, DefuzzPath path) {
  if (path == DefuzzPath::early) {
    const DynamicTerms t = est.centers();
    return t.M * fprime + t.C * qdot + t.G;
  }
  Vec3 tau;
  for (int i = 0; i < 3; ++i) {
    const std::vector<IntervalT1> sets{est.M[i][0], est.M[i][1], est.M[i][2],
                                       est.C[i][0], est.C[i][1], est.C[i][2],
                                       est.G[i]};
    const std::vector<double> alphas{fprime[0], fprime[1], fprime[2],
                                     qdot[0],   qdot[1],   qdot[2],
                                     1.0};
    const IntervalT1 combined = affine_combine_interval(sets, alphas, 0.0);
    tau[i] = centroid_defuzz(FuzzyNumberT1::from_interval(combined));
  }
  return tau;
}

Vec3 fuzzy_ctc_control(const Gains& g, const EstimatorBank& estimators,
                       EstimatorMode mode, const Vec3& q, const Vec3& qdot,
                       const Vec3& qd, const Vec3& qdot_d, const Vec3& qddot_d,
                       DefuzzPath path, FuzzyDynamicTerms* hold) {
  const Vec3 fprime = qddot_d + g.kv * (qdot_d - qdot) + g.kp * (qd - q);
  const FuzzyDynamicTerms est =
      estimate_fuzzy_terms(estimators, features(q, qdot), mode, hold);
  if (hold != nullptr) *hold = est;
  return fuzzy_torque(est, fprime, qdot, path);
}

double fou_width_for_snr(double snr_db) {
  if (std::isinf(snr_db)) return 0.0;
  return 0.25 * std::pow(10.0, (10.0 - snr_db) / 20.0);
}

Gains default_gains(ControllerKind kind) {
  return kind == ControllerKind::pd ? Gains::pd_default() : Gains::ctc_default();
}

double SimResult::mean_loop_us() const {
  if (loop_us.empty()) return 0.0;
  double sum = 0.0;
  for (double v : loop_us) sum += v;
  return sum / static_cast<double>(loop_us.size());
}

double SimResult::p99_loop_us() const {
  if (loop_us.empty()) return 0.0;
  std::vector<double> sorted = loop_us;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t idx = static_cast<std::size_t>(
      std::ceil(0.99 * static_cast<double>(sorted.size())));
  return sorted[std::min(idx, sorted.size()) - 1];
}

SimResult simulate(const RobotParams& plant, const Trajectory& traj,
                   const SimConfig& cfg, const EstimatorBank* estimators) {
  if (traj.size() < 2) throw std::invalid_argument("trajectory too short");
  const bool is_fuzzy = cfg.controller == ControllerKind::fuzzy_t1 ||
                        cfg.controller == ControllerKind::fuzzy_t2;
  if (is_fuzzy && estimators == nullptr)
    throw std::invalid_argument("fuzzy controllers need an estimator bank");
  Gains g = cfg.gains.kp > 0.0 ? cfg.gains : default_gains(cfg.controller);
  g.validate();

  Eigen::VectorXd power(6);
  for (int i = 0; i < 3; ++i) {
    power[i] = channel_variance(traj.q, i);
    power[3 + i] = channel_variance(traj.qdot, i);
  }
  NoiseStream noise(cfg.noise, power);

  EstimatorBank runtime;
  if (is_fuzzy) {
    const double rho =
        cfg.fou_width.value_or(fou_width_for_snr(cfg.noise.snr_db));
    for (std::size_t i = 0; i < estimator_count; ++i) {
      const RuleBase widened = apply_fou((*estimators)[i], rho);
      runtime[i] = cfg.controller == ControllerKind::fuzzy_t2
                       ? widened
                       : downgrade_to_t1(widened);
    }
  }
  const EstimatorMode mode = cfg.controller == ControllerKind::fuzzy_t2
                                 ? EstimatorMode::it2
                                 : EstimatorMode::t1;

  const double dt = traj.dt;
  LoopState st{make_consistent(plant, traj.q[0], GeneralizedCoords::home(plant)),
               traj.qdot[0]};
  GeneralizedCoords meas_warm = st.g;
  std::optional<FuzzyDynamicTerms> held;
  const std::size_t hold = std::max<std::size_t>(1, cfg.noise_refresh_steps);
  Eigen::VectorXd noise_held = Eigen::VectorXd::Zero(6);

  SimResult res;
  if (cfg.record_steps) res.steps.reserve(traj.size());
  if (cfg.record_timing) res.loop_us.reserve(traj.size());
  for (auto& tr : res.feature_traces) tr.reserve(traj.size());

  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = static_cast<double>(k) * dt;
    Eigen::VectorXd clean(6);
    clean << st.g.qa(), st.qdot;
    if (k % hold == 0) noise_held = noise.apply(Eigen::VectorXd::Zero(6));
    const Eigen::VectorXd meas = clean + noise_held;
    const Vec3 q_meas = meas.head<3>();
    const Vec3 qd_meas = meas.tail<3>();
    const Vec4 f = features(q_meas, qd_meas);
    for (int j = 0; j < 4; ++j) res.feature_traces[j].push_back(f[j]);

    // The servo error acts on the true state; the noisy measurements feed
    // only the parameter path (features, assembled terms, and the rate the
    // estimated C multiplies).
    const Vec3 fprime = traj.qddot[k] + g.kv * (traj.qdot[k] - st.qdot) +
                        g.kp * (traj.q[k] - st.g.qa());
    const auto t0 = std::chrono::steady_clock::now();
    Vec3 tau;
    switch (cfg.controller) {
      case ControllerKind::pd:
        tau = pd_control(g, traj.q[k], traj.qdot[k], st.g.qa(), st.qdot);
        break;
      case ControllerKind::ctc: {
        meas_warm = make_consistent(plant, q_meas, meas_warm);
        const DynamicTerms t = assemble_MCG(plant, meas_warm, qd_meas);
        tau = t.M * fprime + t.C * qd_meas + t.G;
        break;
      }
      case ControllerKind::fuzzy_t1:
      case ControllerKind::fuzzy_t2: {
        const FuzzyDynamicTerms est =
            estimate_fuzzy_terms(runtime, f, mode, held ? &*held : nullptr);
        held = est;
        if (est.any_held) ++res.held_steps;
        tau = fuzzy_torque(est, fprime, qd_meas, cfg.path);
        break;
      }
    }
    if (cfg.record_timing) {
      const auto t1 = std::chrono::steady_clock::now();
      res.loop_us.push_back(
          std::chrono::duration<double, std::micro>(t1 - t0).count());
    }

    res.sse += (traj.q[k] - st.g.qa()).squaredNorm();
    if (cfg.record_steps)
      res.steps.push_back(SimStep{t, traj.q[k], st.g.qa(), traj.qdot[k],
                                  st.qdot,
                                  tau,
                                  cfg.record_timing ? res.loop_us.back() : 0.0});

    if (k + 1 == traj.size()) break;
    bool blew_up = false;
    try {
      st = rk4_step(plant, st, tau, dt);
    } catch (const std::runtime_error&) {
      blew_up = true;
    } catch (const std::domain_error&) {
      blew_up = true;
    }
    if (blew_up || !st.g.q.allFinite() || !st.qdot.allFinite() ||
        st.g.qa().cwiseAbs().maxCoeff() > cfg.unstable_bound) {
      res.unstable = true;
      res.unstable_step = k + 1;
      break;
    }
  }
  return res;
}

TrainedEstimators train_estimators(const RobotParams& plant,
                                   const Trajectory& traj,
                                   std::size_t label_count, TNormKind tnorm) {
  if (traj.size() < 500)
    throw std::invalid_argument("training run needs at least 500 samples");
  if (label_count < 2)
    throw std::invalid_argument("need at least two labels per variable");
  traj.validate();

  const std::size_t n = traj.size();
  std::vector<Vec4> feats(n);
  std::array<std::vector<double>, estimator_count> targets;
  for (auto& t : targets) t.reserve(n);

  const Gains g = Gains::ctc_default();
  LoopState st{make_consistent(plant, traj.q[0], GeneralizedCoords::home(plant)),
               traj.qdot[0]};
  for (std::size_t k = 0; k < n; ++k) {
    const DynamicTerms dtm = assemble_MCG(plant, st.g, st.qdot);
    feats[k] = features(st.g.qa(), st.qdot);
    for (std::size_t e = 0; e < 6; ++e)
      targets[e].push_back(dtm.M(m_slot[e][0], m_slot[e][1]));
    for (std::size_t e = 0; e < 9; ++e)
      targets[6 + e].push_back(dtm.C(static_cast<int>(e / 3),
                                     static_cast<int>(e % 3)));
    for (std::size_t e = 0; e < 3; ++e)
      targets[15 + e].push_back(dtm.G[static_cast<int>(e)]);
    if (k + 1 == n) break;
    const Vec3 fprime = traj.qddot[k] + g.kv * (traj.qdot[k] - st.qdot) +
                        g.kp * (traj.q[k] - st.g.qa());
    const Vec3 tau = dtm.M * fprime + dtm.C * st.qdot + dtm.G;
    st = rk4_step(plant, st, tau, traj.dt);
  }

  // Feature variables over the recorded ranges, widened by 5% per side.
  const std::array<const char*, 4> feat_names{"dq12", "dq13", "dv12", "dv13"};
  std::vector<LinguisticVariable> variables;
  TrainingReport report;
  for (int j = 0; j < 4; ++j) {
    double lo = feats[0][j], hi = feats[0][j];
    for (const Vec4& f : feats) {
      lo = std::min(lo, f[j]);
      hi = std::max(hi, f[j]);
    }
    double margin = 0.05 * (hi - lo);
    if (hi - lo < 1e-12) margin = 1e-6;
    lo -= margin;
    hi += margin;
    report.feature_bounds[2 * j] = lo;
    report.feature_bounds[2 * j + 1] = hi;
    variables.push_back(make_variable(feat_names[j], lo, hi, label_count));
  }

  TrainedEstimators out;
  out.report = report;
  out.report.cell_capacity = 1;
  for (int j = 0; j < 4; ++j) out.report.cell_capacity *= label_count;
  for (std::size_t e = 0; e < estimator_count; ++e) {
    std::vector<TrainingSample> samples(n);
    for (std::size_t k = 0; k < n; ++k) {
      samples[k].x = {feats[k][0], feats[k][1], feats[k][2], feats[k][3]};
      samples[k].y = targets[e][k];
    }
    double lo = targets[e][0], hi = targets[e][0];
    for (double y : targets[e]) {
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    out.report.output_span[e] = hi - lo;
    double margin = 0.05 * (hi - lo);
    if (hi - lo < 1e-12) margin = 1e-6;
    WangMendelResult learned = wang_mendel_learn(
        samples, variables, OutputSpec{estimator_names[e], lo - margin, hi + margin},
        tnorm);
    // Consequent-ordered rules keep the reduction's sort cheap; inference is
    // order-independent.
    std::sort(learned.base.rules.begin(), learned.base.rules.end(),
              [](const Rule& a, const Rule& b) {
                if (a.c != b.c) return a.c < b.c;
                return a.antecedent < b.antecedent;
              });
    out.report.per_element[e] = learned.report;
    out.report.rule_counts[e] = learned.base.rules.size();
    out.bank[e] = std::move(learned.base);
  }
  const double occupied = static_cast<double>(out.report.rule_counts[0]);
  out.report.sparse_coverage =
      occupied < 0.5 * static_cast<double>(out.report.cell_capacity);

  // Resubstitution residuals over the recorded run, grade tables shared
  // across the bank as in the control loop.
  std::array<double, estimator_count> sq{};
  std::vector<double> x(4);
  for (std::size_t k = 0; k < n; ++k) {
    for (int j = 0; j < 4; ++j) x[j] = feats[k][j];
    const GradeTableT1 grades = label_grades_t1(out.bank[0].inputs, x);
    for (std::size_t e = 0; e < estimator_count; ++e) {
      const double r = infer_t1_cached(out.bank[e], grades) - targets[e][k];
      sq[e] += r * r;
    }
  }
  for (std::size_t e = 0; e < estimator_count; ++e)
    out.report.rms_residual[e] = std::sqrt(sq[e] / static_cast<double>(n));
  return out;
}

}  // namespace t2ctc
