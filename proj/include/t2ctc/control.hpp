#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "t2ctc/fls.hpp"
#include "t2ctc/robot.hpp"

namespace t2ctc {

using Vec4 = Eigen::Vector4d;

// Proportional / derivative servo gains. The defaults mirror the trial
// settings: a stiff pair for the plain PD loop and a soft pair for the
// model-based loops whose servo acts on acceleration.
struct Gains {
  double kp = 0.0;
  double kv = 0.0;

  static Gains pd_default() { return {1000.0, 100.0}; }
  static Gains ctc_default() { return {10.0, 1.0}; }
  static Gains critically_damped(double kp);

  void validate() const;  // kp > 0, kv >= 0
};

// Additive measurement noise level; snr_db = infinity disables injection.
struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
};

// Adds zero-mean gaussian noise of variance reference_power / 10^(snr/10) to
// every entry, from a Box-Muller stream seeded by spec.seed. Bit-identical
// under the same spec; the identity when snr_db is infinite.
Eigen::VectorXd inject_noise(const Eigen::VectorXd& values,
                             const NoiseSpec& spec, double reference_power);

// Stateful per-channel variant used inside the simulation loop: one gaussian
// draw per channel per call, in channel order, from a single seeded stream.
class NoiseStream {
 public:
  NoiseStream(const NoiseSpec& spec, Eigen::VectorXd channel_power);
  Eigen::VectorXd apply(const Eigen::VectorXd& clean);

 private:
  bool enabled_ = false;
  Eigen::VectorXd sigma_;
  std::mt19937_64 rng_;
  std::optional<double> spare_;
};

// Actuator-space reference with matched rates and accelerations.
struct Trajectory {
  double dt = 1e-3;
  std::vector<Vec3> q, qdot, qddot;

  std::size_t size() const { return q.size(); }
  // Interior rates must match the central difference of q to 1e-3 of the
  // peak speed; throws std::invalid_argument otherwise.
  void validate() const;
};

// Task-space helix (linear rise, circular tilt) carried to actuator space
// through the inverse kinematics, with rates and accelerations from central
// differences of the solved samples plus one binomial smoothing pass.
Trajectory helix_trajectory(const RobotParams& p, double rise_rate = 0.005,
                            double tilt_radius = 0.1, double period = 2.0,
                            double duration = 10.0, double dt = 1e-3);

// The four differences that determine the dynamic terms: (q1-q2, q1-q3,
// qdot1-qdot2, qdot1-qdot3). The third pairwise difference is redundant.
Vec4 features(const Vec3& qa, const Vec3& qdot_a);

Vec3 pd_control(const Gains& g, const Vec3& qd, const Vec3& qdot_d,
                const Vec3& q, const Vec3& qdot);

// Computed-torque law: f' = qddot_d + kv (qdot_d - qdot) + kp (qd - q.qa()),
// tau = M f' + C qdot + G with the terms assembled fresh at the given state.
Vec3 ctc_control(const Gains& g, const RobotParams& model,
                 const GeneralizedCoords& q, const Vec3& qdot, const Vec3& qd,
                 const Vec3& qdot_d, const Vec3& qddot_d);

// Interval-valued estimates of the dynamic terms, one fuzzy system per
// element: six for the symmetric mass matrix, nine for C, three for G.
inline constexpr std::size_t estimator_count = 18;
inline constexpr std::array<const char*, estimator_count> estimator_names = {
    "M11", "M12", "M13", "M22", "M23", "M33", "C11", "C12", "C13",
    "C21", "C22", "C23", "C31", "C32", "C33", "G1",  "G2",  "G3"};

using EstimatorBank = std::array<RuleBase, estimator_count>;

enum class EstimatorMode { t1, it2 };

struct FuzzyDynamicTerms {
  IntervalT1 M[3][3];
  IntervalT1 C[3][3];
  IntervalT1 G[3];
  std::array<bool, estimator_count> held{};  // element fell back to last value
  bool any_held = false;

  DynamicTerms centers() const;
};

// Evaluates every estimator at the feature vector. Elements where no rule
// fires hold their previous value (taken from *last) and set their flag; with
// no previous value to hold, the no-fire error propagates.
FuzzyDynamicTerms estimate_fuzzy_terms(const EstimatorBank& estimators,
                                       const Vec4& feats, EstimatorMode mode,
                                       const FuzzyDynamicTerms* last = nullptr);

enum class DefuzzPath { deferred, early };

// Servo torque from estimated terms. The deferred path combines the interval
// elements affinely (tau_i = sum_j M_ij f'_j + sum_j C_ij qdot_j + G_i) and
// defuzzifies the resulting interval; the early path defuzzifies every
// element first and uses crisp algebra.
Vec3 fuzzy_torque(const FuzzyDynamicTerms& est, const Vec3& fprime,
                  const Vec3& qdot, DefuzzPath path);

Vec3 fuzzy_ctc_control(const Gains& g, const EstimatorBank& estimators,
                       EstimatorMode mode, const Vec3& q, const Vec3& qdot,
                       const Vec3& qd, const Vec3& qdot_d, const Vec3& qddot_d,
                       DefuzzPath path, FuzzyDynamicTerms* hold = nullptr);

// Width of the mean-uncertainty band applied to the trained labels before an
// interval run: 0.25 at 10 dB, halving every 6 dB of extra signal, zero for
// a noise-free run. Keeps the type-1 downgrade independent of the noise
// level while the interval machine widens with it.
double fou_width_for_snr(double snr_db);

enum class ControllerKind { pd, ctc, fuzzy_t1, fuzzy_t2 };

struct SimConfig {
  ControllerKind controller = ControllerKind::ctc;
  Gains gains;  // zero-initialized means "default for the controller kind"
  NoiseSpec noise;
  DefuzzPath path = DefuzzPath::deferred;
  // Band width for the interval run; defaults to fou_width_for_snr.
  std::optional<double> fou_width;
  // Control steps between fresh measurement samples. The sensing path runs
  // slower than the 1 kHz servo loop, so a drawn noise vector is held until
  // the next sample arrives (default: one sample every 0.3 s at dt = 1 ms).
  std::size_t noise_refresh_steps = 300;
  bool record_timing = true;
  bool record_steps = true;        // keep the per-step table
  double unstable_bound = 10.0;    // |qa| beyond this marks the run unstable
};

Gains default_gains(ControllerKind kind);

struct SimStep {
  double t = 0.0;
  Vec3 qd, q, qdot_d, qdot, tau;
  double loop_us = 0.0;
};

struct SimResult {
  std::vector<SimStep> steps;
  std::vector<double> loop_us;  // controller time per step, timing runs only
  std::array<std::vector<double>, 4> feature_traces;  // measured features
  double sse = 0.0;  // sum over steps and joints of (qd - q)^2
  bool unstable = false;
  std::size_t unstable_step = 0;
  std::size_t held_steps = 0;  // steps where any estimator held its value

  double mean_loop_us() const;
  double p99_loop_us() const;
};

// Fixed-step closed loop: RK4 on the actuator dynamics with zero-order-hold
// torque over each control period, passive coordinates re-solved at every
// stage. Noise-injected measurements of (qa, qdot_a) feed the controller's
// parameter path (feature extraction for the fuzzy kinds, term assembly for
// the computed-torque baseline); the servo error acts on the true state, so
// the plain PD loop is noise-free. Estimator banks are required for the
// fuzzy controller kinds.
SimResult simulate(const RobotParams& plant, const Trajectory& traj,
                   const SimConfig& cfg,
                   const EstimatorBank* estimators = nullptr);

struct TrainingReport {
  std::array<LearnReport, estimator_count> per_element{};
  std::array<std::size_t, estimator_count> rule_counts{};
  // Resubstitution error of the learned base over its own training samples.
  std::array<double, estimator_count> rms_residual{};
  std::array<double, estimator_count> output_span{};  // recorded target range
  std::size_t cell_capacity = 0;   // label_count^4
  bool sparse_coverage = false;    // > 50% of reachable cells empty everywhere
  std::array<double, 8> feature_bounds{};  // lo/hi per feature after margin
};

struct TrainedEstimators {
  EstimatorBank bank;
  TrainingReport report;
};

// Runs a noise-free computed-torque pass over the trajectory, records the
// feature vector and the true dynamic terms at every step, and learns one
// rule base per element by table lookup. Feature and output ranges are the
// recorded extrema widened by 5%.
TrainedEstimators train_estimators(const RobotParams& plant,
                                   const Trajectory& traj,
                                   std::size_t label_count = 5,
                                   TNormKind tnorm = TNormKind::product);

}  // namespace t2ctc
