#pragma once

#include <array>

#include <Eigen/Dense>

namespace t2ctc {

using Vec3 = Eigen::Vector3d;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using MatL = Eigen::Matrix<double, 15, 3>;   // joint orthogonal complement
using MatT = Eigen::Matrix<double, 78, 3>;   // stacked link twists per unit actuator rate
using MatPhi = Eigen::Matrix<double, 12, 15>;

// Constant parameters of the 3-PSP platform: three ball-screw nuts (links
// 1-3), nine one-DOF gimbal elements forming the spherical joints (links
// 4-12, three per arm), and the star plate (link 13). Inertias are taken
// about each link's own frame with the center of mass at the frame origin.
struct RobotParams {
  double d = 0.181;  // plate center to screw axis, meters
  double h = 0.070;  // tool tip length, meters
  double g = 9.81;   // m/s^2
  std::array<double, 13> mass{};
  std::array<Mat3, 13> inertia{};  // kg m^2

  static RobotParams defaults();
  // Masses positive, inertias symmetric positive definite, d/h/g positive;
  // throws std::invalid_argument otherwise.
  void validate() const;
  double total_mass() const;
};

// q = (a1,a2,a3 | phi1,theta1,lambda1,phi2,theta2,lambda2,phi3,theta3,lambda3
//      | b1,b2,b3); the first three entries are the actuated ball-screw
// lengths, the remaining twelve are passive.
struct GeneralizedCoords {
  Vec15 q = Vec15::Zero();

  Vec3 qa() const { return q.head<3>(); }
  Vec12 qu() const { return q.tail<12>(); }
  void set_qa(const Vec3& v) { q.head<3>() = v; }
  void set_qu(const Vec12& v) { q.tail<12>() = v; }

  // All angles zero, a = 0, b = d; every constraint vanishes there.
  static GeneralizedCoords home(const RobotParams& p);
  static GeneralizedCoords from_parts(const Vec3& qa, const Vec12& qu);
};

// The platform's three mixed degrees of freedom: tool-tip height plus the
// two tilts of the tool axis about X and Y.
struct ToolPose {
  double z = 0.0;
  double tilt_x = 0.0;  // radians
  double tilt_y = 0.0;  // radians
};

inline constexpr double workspace_tilt_bound = 0.3;  // radians

struct DynamicTerms {
  Mat3 M = Mat3::Zero();
  Mat3 C = Mat3::Zero();
  Vec3 G = Vec3::Zero();
};

// Tool-tip frame of one arm's serial chain (arm in {1,2,3}); the three agree
// exactly on consistent configurations.
Mat4 arm_transform(const RobotParams& p, int arm, const GeneralizedCoords& q);

// World pose of each of the 13 links.
std::array<Mat4, 13> link_poses(const RobotParams& p, const GeneralizedCoords& q);

// The 12 loop-closure residuals: entries 0-5 are the interleaved translation
// differences (T2-T1 and T2-T3 per axis), entries 6-11 the Cayley-parameter
// differences (S1-S2 and S1-S3 at the three upper off-diagonal slots).
// Throws std::domain_error("orientation singularity in constraint map") when
// any I+R is singular (tool rotated near pi).
Vec12 constraints(const RobotParams& p, const GeneralizedCoords& q);

// Central-difference Jacobian of the residuals in all 15 coordinates.
MatPhi constraint_jacobian(const RobotParams& p, const GeneralizedCoords& q);

struct NewtonStats {
  int iterations = 0;
  double residual = 0.0;
};

// Newton solve of the 12 residuals for the passive coordinates at fixed qa,
// with step halving on residual increase. Throws std::runtime_error on
// non-convergence (message carries the residual norm) or
// std::runtime_error("kinematic singularity") when the passive Jacobian
// block loses rank.
Vec12 solve_passive(const RobotParams& p, const Vec3& qa, const Vec12& guess,
                    NewtonStats* stats = nullptr);

// solve_passive plus assembly into a full coordinate vector.
GeneralizedCoords make_consistent(const RobotParams& p, const Vec3& qa,
                                  const GeneralizedCoords& guess);

// Tool pose read from arm 1's chain: z from the tip position, tilts from the
// tool axis direction.
ToolPose forward_kinematics(const RobotParams& p, const GeneralizedCoords& q);

// Newton on (z, tilt_x, tilt_y) over qa with the passive solve nested inside;
// returns the full consistent configuration. Throws std::domain_error when
// the requested tilts exceed workspace_tilt_bound, std::runtime_error on
// non-convergence.
GeneralizedCoords inverse_kinematics(const RobotParams& p, const ToolPose& pose,
                                     const GeneralizedCoords& guess,
                                     NewtonStats* stats = nullptr);

// L = [I3; -(Phi_u)^-1 Phi_a]; maps actuator rates to all 15 joint rates and
// annihilates the constraint Jacobian.
MatL joint_complement_L(const RobotParams& p, const GeneralizedCoords& q);

// Natural orthogonal complement: rows 6i..6i+5 hold link i's twist
// (angular; linear) per unit actuator rate. Computed by central differences
// of the link poses along the columns of L.
MatT noc_T(const RobotParams& p, const GeneralizedCoords& q);

// Directional derivative of noc_T along the motion q_dot = L qdot_a.
MatT noc_Tdot(const RobotParams& p, const GeneralizedCoords& q, const Vec3& qdot_a);

// M = T' Mtot T, C = T' Mtot Tdot + T' Omega Mtot T, G = -T' wg, with Mtot
// block-diagonal per link (world-frame inertia; mass), Omega the per-link
// angular-velocity cross operators on the angular blocks, and wg the gravity
// wrench stack.
DynamicTerms assemble_MCG(const RobotParams& p, const GeneralizedCoords& q,
                          const Vec3& qdot_a);

// tau = M qddot + C qdot + G at the given consistent configuration.
Vec3 inverse_dynamics(const RobotParams& p, const GeneralizedCoords& q,
                      const Vec3& qdot_a, const Vec3& qddot_a);

// Solves M qddot = tau - C qdot - G via Cholesky; throws std::runtime_error
// if M is not positive definite.
Vec3 forward_dynamics(const RobotParams& p, const GeneralizedCoords& q,
                      const Vec3& qdot_a, const Vec3& tau);

}  // namespace t2ctc
