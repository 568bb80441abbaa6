#include "t2ctc/robot.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace t2ctc {
namespace {

// The pose chains and their finite differences run in extended precision so
// that the second-difference noise in the Coriolis assembly stays well below
// the invariance tolerances of the dynamic terms.
using Real = long double;
using Mat3R = Eigen::Matrix<Real, 3, 3>;
using Vec3R = Eigen::Matrix<Real, 3, 1>;
using Vec12R = Eigen::Matrix<Real, 12, 1>;
using Vec15R = Eigen::Matrix<Real, 15, 1>;
using JacActive = Eigen::Matrix<Real, 12, 3>;
using JacPassive = Eigen::Matrix<Real, 12, 12>;
using LReal = Eigen::Matrix<Real, 15, 3>;
using TReal = Eigen::Matrix<Real, 78, 3>;

constexpr Real fd_step = 1e-6L;       // constraint Jacobian and twist differences
constexpr Real fd_step_rate = 1e-4L;  // outer step of the double difference in Tdot

struct PoseR {
  Mat3R R;
  Vec3R p;
};

PoseR operator*(const PoseR& a, const PoseR& b) {
  return {a.R * b.R, a.R * b.p + a.p};
}

using Frames = std::array<PoseR, 13>;

PoseR translation(Real x, Real y, Real z) {
  return {Mat3R::Identity(), Vec3R(x, y, z)};
}

PoseR rot_z(Real a) {
  PoseR t{Mat3R::Identity(), Vec3R::Zero()};
  const Real s = std::sin(a), c = std::cos(a);
  t.R(0, 0) = c;
  t.R(0, 1) = -s;
  t.R(1, 0) = s;
  t.R(1, 1) = c;
  return t;
}

PoseR rot_y(Real a) {
  PoseR t{Mat3R::Identity(), Vec3R::Zero()};
  const Real s = std::sin(a), c = std::cos(a);
  t.R(0, 0) = c;
  t.R(0, 2) = s;
  t.R(2, 0) = -s;
  t.R(2, 2) = c;
  return t;
}

// Elementary factors of the per-arm chains. The first shape drives phi and
// theta, the second lambda, the third the top prismatic slide.
PoseR gimbal_first(Real x) {
  PoseR t{Mat3R::Zero(), Vec3R::Zero()};
  const Real s = std::sin(x), c = std::cos(x);
  t.R(0, 0) = s;
  t.R(0, 1) = c;
  t.R(1, 2) = 1;
  t.R(2, 0) = c;
  t.R(2, 1) = -s;
  return t;
}

PoseR gimbal_last(Real x) {
  PoseR t{Mat3R::Zero(), Vec3R::Zero()};
  const Real s = std::sin(x), c = std::cos(x);
  t.R(0, 0) = c;
  t.R(0, 1) = -s;
  t.R(1, 2) = 1;
  t.R(2, 0) = -s;
  t.R(2, 1) = -c;
  return t;
}

PoseR top_slide(Real b) {
  PoseR t{Mat3R::Zero(), Vec3R(0, b, 0)};
  t.R(0, 0) = 1;
  t.R(1, 2) = 1;
  t.R(2, 1) = -1;
  return t;
}

PoseR arm_base(const RobotParams& p, int arm) {
  const Real third = 2 * std::numbers::pi_v<Real> / 3;
  const Real half_d = Real(p.d) / 2;
  const Real side = std::sqrt(Real(3)) / 2 * Real(p.d);
  switch (arm) {
    case 1:
      return translation(p.d, 0, 0);
    case 2:
      return translation(-half_d, side, 0) * rot_z(third);
    case 3:
      return translation(-half_d, -side, 0) * rot_z(2 * third);
    default:
      throw std::invalid_argument("arm index must be 1, 2 or 3");
  }
}

struct ArmFrames {
  PoseR nut;
  std::array<PoseR, 3> gimbal;
  PoseR carrier;  // after the top slide and tool alignment; origin at the star center
  PoseR tip;
};

ArmFrames arm_frames(const RobotParams& p, int arm, const Vec15R& q) {
  const int k = arm - 1;
  ArmFrames f;
  f.nut = arm_base(p, arm) * translation(0, 0, q[k]);
  f.gimbal[0] = f.nut * gimbal_first(q[3 + 3 * k]);
  f.gimbal[1] = f.gimbal[0] * gimbal_first(q[4 + 3 * k]);
  f.gimbal[2] = f.gimbal[1] * gimbal_last(q[5 + 3 * k]);
  f.carrier = f.gimbal[2] * top_slide(q[12 + k]);
  if (arm != 1) {
    const Real third = 2 * std::numbers::pi_v<Real> / 3;
    f.carrier = f.carrier * rot_y(arm == 2 ? third : 2 * third);
  }
  f.tip = f.carrier * translation(0, -Real(p.h), 0);
  return f;
}

// Links 1-3 are the nuts, 4-12 the gimbal elements (three per arm), 13 the
// star, whose frame sits at the star center with the tip orientation.
Frames link_frames_impl(const RobotParams& p, const Vec15R& q) {
  Frames out;
  for (int arm = 1; arm <= 3; ++arm) {
    ArmFrames f = arm_frames(p, arm, q);
    out[arm - 1] = f.nut;
    for (int j = 0; j < 3; ++j) out[3 + 3 * (arm - 1) + j] = f.gimbal[j];
    if (arm == 1) out[12] = f.carrier;
  }
  return out;
}

// Tip position plus the Cayley parameters of the tip rotation; one arm's
// share of the loop-closure residuals.
struct ArmClosure {
  Vec3R pos;
  Mat3R S;
};

ArmClosure arm_closure(const RobotParams& p, int arm, const Vec15R& q) {
  const PoseR tip = arm_frames(p, arm, q).tip;
  const Mat3R ipr = Mat3R::Identity() + tip.R;
  if (std::abs(ipr.determinant()) < 1e-9L)
    throw std::domain_error("orientation singularity in constraint map");
  return {tip.p, ipr.inverse() * (tip.R - Mat3R::Identity())};
}

Vec12R closure_residuals(const std::array<ArmClosure, 3>& c) {
  Vec12R r;
  for (int axis = 0; axis < 3; ++axis) {
    r[2 * axis] = c[1].pos[axis] - c[0].pos[axis];
    r[2 * axis + 1] = c[1].pos[axis] - c[2].pos[axis];
  }
  constexpr int rows[3] = {0, 0, 1};
  constexpr int cols[3] = {1, 2, 2};
  for (int k = 0; k < 3; ++k) {
    r[6 + 2 * k] = c[0].S(rows[k], cols[k]) - c[1].S(rows[k], cols[k]);
    r[7 + 2 * k] = c[0].S(rows[k], cols[k]) - c[2].S(rows[k], cols[k]);
  }
  return r;
}

std::array<ArmClosure, 3> all_closures(const RobotParams& p, const Vec15R& q) {
  return {arm_closure(p, 1, q), arm_closure(p, 2, q), arm_closure(p, 3, q)};
}

Vec12R constraints_impl(const RobotParams& p, const Vec15R& q) {
  return closure_residuals(all_closures(p, q));
}

// Which arm's chain a generalized coordinate drives.
int owner_arm(int coord) {
  if (coord < 3) return coord + 1;
  if (coord < 12) return (coord - 3) / 3 + 1;
  return coord - 12 + 1;
}

// Central-difference Jacobian columns; only the owning arm's closure is
// recomputed per perturbation.
template <int N>
Eigen::Matrix<Real, 12, N> jac_columns(const RobotParams& p, const Vec15R& q, int first) {
  const std::array<ArmClosure, 3> base = all_closures(p, q);
  Eigen::Matrix<Real, 12, N> j;
  for (int col = 0; col < N; ++col) {
    const int coord = first + col;
    const int arm = owner_arm(coord);
    Vec15R qp = q, qm = q;
    qp[coord] += fd_step;
    qm[coord] -= fd_step;
    std::array<ArmClosure, 3> plus = base, minus = base;
    plus[arm - 1] = arm_closure(p, arm, qp);
    minus[arm - 1] = arm_closure(p, arm, qm);
    j.col(col) = (closure_residuals(plus) - closure_residuals(minus)) / (2 * fd_step);
  }
  return j;
}

JacActive jac_active(const RobotParams& p, const Vec15R& q) {
  return jac_columns<3>(p, q, 0);
}

JacPassive jac_passive(const RobotParams& p, const Vec15R& q) {
  return jac_columns<12>(p, q, 3);
}

Vec12R solve_passive_impl(const RobotParams& p, const Vec3R& qa, const Vec12R& guess,
                          NewtonStats* stats) {
  Vec15R q;
  q.head<3>() = qa;
  q.tail<12>() = guess;
  Vec12R f = constraints_impl(p, q);
  Real res = f.cwiseAbs().maxCoeff();
  Eigen::FullPivLU<JacPassive> lu;
  bool have_jac = false, fresh = false;
  int iters = 0;
  while (iters < 50 && res > 1e-12L) {
    ++iters;
    if (!have_jac) {
      lu.compute(jac_passive(p, q));
      if (!lu.isInvertible()) throw std::runtime_error("kinematic singularity");
      have_jac = true;
      fresh = true;
    }
    const Vec12R step = lu.solve(-f);
    Real alpha = 1;
    bool accepted = false;
    for (int k = 0; k <= 8; ++k, alpha /= 2) {
      Vec15R trial = q;
      trial.tail<12>() += alpha * step;
      Vec12R ft;
      try {
        ft = constraints_impl(p, trial);
      } catch (const std::domain_error&) {
        continue;  // overshot into an orientation singularity; shorten the step
      }
      const Real rt = ft.cwiseAbs().maxCoeff();
      if (rt < res) {
        q = trial;
        f = ft;
        if (rt > res / 2) have_jac = false;  // slow progress: Jacobian went stale
        res = rt;
        accepted = true;
        break;
      }
    }
    if (accepted) {
      fresh = false;
    } else if (fresh) {
      break;  // no descent even with a fresh Jacobian
    } else {
      have_jac = false;
    }
  }
  if (stats) {
    stats->iterations = iters;
    stats->residual = static_cast<double>(res);
  }
  if (res <= 1e-10L) return q.tail<12>();
  std::ostringstream msg;
  msg << "passive solve did not converge: max residual " << static_cast<double>(res);
  throw std::runtime_error(msg.str());
}

LReal L_impl(const RobotParams& p, const Vec15R& q) {
  Eigen::FullPivLU<JacPassive> lu(jac_passive(p, q));
  if (!lu.isInvertible()) throw std::runtime_error("kinematic singularity");
  LReal L;
  L.topRows<3>() = Eigen::Matrix<Real, 3, 3>::Identity();
  L.bottomRows<12>() = -lu.solve(jac_active(p, q));
  return L;
}

TReal T_impl(const RobotParams& p, const Vec15R& q, const LReal& L) {
  TReal T;
  const Frames base = link_frames_impl(p, q);
  for (int j = 0; j < 3; ++j) {
    const Vec15R dq = L.col(j) * fd_step;
    const Frames plus = link_frames_impl(p, q + dq);
    const Frames minus = link_frames_impl(p, q - dq);
    for (int i = 0; i < 13; ++i) {
      const Mat3R w = (plus[i].R - minus[i].R) * base[i].R.transpose() / (2 * fd_step);
      T(6 * i + 0, j) = (w(2, 1) - w(1, 2)) / 2;
      T(6 * i + 1, j) = (w(0, 2) - w(2, 0)) / 2;
      T(6 * i + 2, j) = (w(1, 0) - w(0, 1)) / 2;
      T.block<3, 1>(6 * i + 3, j) = (plus[i].p - minus[i].p) / (2 * fd_step);
    }
  }
  return T;
}

TReal Tdot_impl(const RobotParams& p, const Vec15R& q, const LReal& L, const Vec3R& qdot_a) {
  const Vec15R u = L * qdot_a;
  const Real speed = u.norm();
  if (!(speed > 0)) return TReal::Zero();
  const Vec15R du = u * (fd_step_rate / speed);
  const Vec15R qp = q + du, qm = q - du;
  const TReal tp = T_impl(p, qp, L_impl(p, qp));
  const TReal tm = T_impl(p, qm, L_impl(p, qm));
  return (tp - tm) * (speed / (2 * fd_step_rate));
}

Mat3 skew(const Vec3& w) {
  Mat3 s;
  s << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return s;
}

Mat4 to_mat4(const PoseR& t) {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = t.R.cast<double>();
  m.topRightCorner<3, 1>() = t.p.cast<double>();
  return m;
}

}  // namespace

RobotParams RobotParams::defaults() {
  RobotParams p;
  for (int i = 0; i < 3; ++i) {
    p.mass[i] = 7.175;
    p.inertia[i] = Vec3(0.003, 0.39, 0.3294).asDiagonal();
  }
  for (int i = 3; i < 12; ++i) {
    p.mass[i] = 0.357;
    p.inertia[i] = (1e-3 * Vec3(0.094, 0.094, 0.1117)).asDiagonal();
  }
  p.mass[12] = 1.758;
  p.inertia[12] = Vec3(0.6451, 1.2901, 0.6451).asDiagonal();
  return p;
}

void RobotParams::validate() const {
  if (!(d > 0) || !(h > 0) || !(g > 0))
    throw std::invalid_argument("robot dimensions and gravity must be positive");
  for (int i = 0; i < 13; ++i) {
    if (!(mass[i] > 0)) throw std::invalid_argument("link masses must be positive");
    if ((inertia[i] - inertia[i].transpose()).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("inertia matrices must be symmetric");
    Eigen::LLT<Mat3> llt(inertia[i]);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("inertia matrices must be positive definite");
  }
}

double RobotParams::total_mass() const {
  double sum = 0;
  for (double m : mass) sum += m;
  return sum;
}

GeneralizedCoords GeneralizedCoords::home(const RobotParams& p) {
  GeneralizedCoords g;
  g.q.tail<3>().setConstant(p.d);
  return g;
}

GeneralizedCoords GeneralizedCoords::from_parts(const Vec3& qa, const Vec12& qu) {
  GeneralizedCoords g;
  g.set_qa(qa);
  g.set_qu(qu);
  return g;
}

Mat4 arm_transform(const RobotParams& p, int arm, const GeneralizedCoords& q) {
  return to_mat4(arm_frames(p, arm, q.q.cast<Real>()).tip);
}

std::array<Mat4, 13> link_poses(const RobotParams& p, const GeneralizedCoords& q) {
  const Frames f = link_frames_impl(p, q.q.cast<Real>());
  std::array<Mat4, 13> out;
  for (int i = 0; i < 13; ++i) out[i] = to_mat4(f[i]);
  return out;
}

Vec12 constraints(const RobotParams& p, const GeneralizedCoords& q) {
  return constraints_impl(p, q.q.cast<Real>()).cast<double>();
}

MatPhi constraint_jacobian(const RobotParams& p, const GeneralizedCoords& q) {
  const Vec15R qr = q.q.cast<Real>();
  MatPhi j;
  j.leftCols<3>() = jac_active(p, qr).cast<double>();
  j.rightCols<12>() = jac_passive(p, qr).cast<double>();
  return j;
}

Vec12 solve_passive(const RobotParams& p, const Vec3& qa, const Vec12& guess,
                    NewtonStats* stats) {
  return solve_passive_impl(p, qa.cast<Real>(), guess.cast<Real>(), stats).cast<double>();
}

GeneralizedCoords make_consistent(const RobotParams& p, const Vec3& qa,
                                  const GeneralizedCoords& guess) {
  return GeneralizedCoords::from_parts(qa, solve_passive(p, qa, guess.qu()));
}

ToolPose forward_kinematics(const RobotParams& p, const GeneralizedCoords& q) {
  const Mat4 tip = arm_transform(p, 1, q);
  const Vec3 axis = -tip.block<3, 1>(0, 1);  // tool direction, +z at home
  ToolPose pose;
  pose.z = tip(2, 3);
  pose.tilt_x = std::atan2(-axis.y(), axis.z());
  pose.tilt_y = std::atan2(axis.x(), axis.z());
  return pose;
}

GeneralizedCoords inverse_kinematics(const RobotParams& p, const ToolPose& pose,
                                     const GeneralizedCoords& guess, NewtonStats* stats) {
  if (std::abs(pose.tilt_x) > workspace_tilt_bound ||
      std::abs(pose.tilt_y) > workspace_tilt_bound)
    throw std::domain_error("tool pose outside the tilt workspace");
  GeneralizedCoords cur = make_consistent(p, guess.qa(), guess);
  const auto residual = [&](const GeneralizedCoords& g) {
    const ToolPose fk = forward_kinematics(p, g);
    return Vec3(fk.z - pose.z, fk.tilt_x - pose.tilt_x, fk.tilt_y - pose.tilt_y);
  };
  Vec3 r = residual(cur);
  double res = r.lpNorm<Eigen::Infinity>();
  Mat3 jac;
  bool have_jac = false, fresh = false;
  int iters = 0;
  while (iters < 50 && res > 1e-11) {
    ++iters;
    if (!have_jac) {
      for (int j = 0; j < 3; ++j) {
        Vec3 qp = cur.qa(), qm = cur.qa();
        qp[j] += 1e-6;
        qm[j] -= 1e-6;
        jac.col(j) = (residual(make_consistent(p, qp, cur)) -
                      residual(make_consistent(p, qm, cur))) /
                     2e-6;
      }
      have_jac = true;
      fresh = true;
    }
    Eigen::FullPivLU<Mat3> lu(jac);
    if (!lu.isInvertible()) throw std::runtime_error("kinematic singularity");
    const Vec3 step = lu.solve(-r);
    double alpha = 1;
    bool accepted = false;
    for (int k = 0; k <= 8; ++k, alpha /= 2) {
      GeneralizedCoords trial;
      Vec3 rt;
      try {
        trial = make_consistent(p, cur.qa() + alpha * step, cur);
        rt = residual(trial);
      } catch (const std::exception&) {
        continue;  // trial actuator lengths outside the solvable region
      }
      const double r_norm = rt.lpNorm<Eigen::Infinity>();
      if (r_norm < res) {
        cur = trial;
        r = rt;
        if (r_norm > res / 2) have_jac = false;
        res = r_norm;
        accepted = true;
        break;
      }
    }
    if (accepted) {
      fresh = false;
    } else if (fresh) {
      break;
    } else {
      have_jac = false;
    }
  }
  if (stats) {
    stats->iterations = iters;
    stats->residual = res;
  }
  if (res <= 1e-9) return cur;
  std::ostringstream msg;
  msg << "inverse kinematics did not converge: max residual " << res;
  throw std::runtime_error(msg.str());
}

MatL joint_complement_L(const RobotParams& p, const GeneralizedCoords& q) {
  return L_impl(p, q.q.cast<Real>()).cast<double>();
}

MatT noc_T(const RobotParams& p, const GeneralizedCoords& q) {
  const Vec15R qr = q.q.cast<Real>();
  return T_impl(p, qr, L_impl(p, qr)).cast<double>();
}

MatT noc_Tdot(const RobotParams& p, const GeneralizedCoords& q, const Vec3& qdot_a) {
  const Vec15R qr = q.q.cast<Real>();
  return Tdot_impl(p, qr, L_impl(p, qr), qdot_a.cast<Real>()).cast<double>();
}

DynamicTerms assemble_MCG(const RobotParams& p, const GeneralizedCoords& q,
                          const Vec3& qdot_a) {
  const Vec15R qr = q.q.cast<Real>();
  const LReal L = L_impl(p, qr);
  const Eigen::Matrix<double, 78, 3> T = T_impl(p, qr, L).cast<double>();
  const Eigen::Matrix<double, 78, 3> Td =
      Tdot_impl(p, qr, L, qdot_a.cast<Real>()).cast<double>();
  const Frames frames = link_frames_impl(p, qr);
  DynamicTerms out;
  for (int i = 0; i < 13; ++i) {
    const Mat3 rot = frames[i].R.cast<double>();
    const Mat3 inertia_w = rot * p.inertia[i] * rot.transpose();
    const double m = p.mass[i];
    const Mat3 tw = T.block<3, 3>(6 * i, 0);
    const Mat3 tv = T.block<3, 3>(6 * i + 3, 0);
    const Mat3 tdw = Td.block<3, 3>(6 * i, 0);
    const Mat3 tdv = Td.block<3, 3>(6 * i + 3, 0);
    out.M += tw.transpose() * inertia_w * tw + m * tv.transpose() * tv;
    const Vec3 omega = tw * qdot_a;
    out.C += tw.transpose() * (inertia_w * tdw + skew(omega) * inertia_w * tw) +
             m * tv.transpose() * tdv;
    out.G += m * p.g * tv.row(2).transpose();
  }
  return out;
}

Vec3 inverse_dynamics(const RobotParams& p, const GeneralizedCoords& q, const Vec3& qdot_a,
                      const Vec3& qddot_a) {
  const DynamicTerms t = assemble_MCG(p, q, qdot_a);
  return t.M * qddot_a + t.C * qdot_a + t.G;
}

Vec3 forward_dynamics(const RobotParams& p, const GeneralizedCoords& q, const Vec3& qdot_a,
                      const Vec3& tau) {
  const DynamicTerms t = assemble_MCG(p, q, qdot_a);
  Eigen::LLT<Mat3> llt(t.M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("mass matrix not positive definite");
  return llt.solve(tau - t.C * qdot_a - t.G);
}

}  // namespace t2ctc
