#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>

namespace tacgraph {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Tangent-space increment on SE(3): [rotation (rad); translation (m)].
using Twist = Vec6;

// Wrench at a frame: [force (N); torque (N*m)].
using Wrench = Vec6;

// Rigid transform, stored as unit quaternion + translation. The quaternion
// is renormalized (and sign-canonicalized to w >= 0) on every construction
// to bound drift under repeated composition.
class Pose {
 public:
  Pose() : q_(Eigen::Quaterniond::Identity()), t_(Vec3::Zero()) {}
  Pose(const Eigen::Quaterniond& q, const Vec3& t);

  static Pose identity() { return Pose(); }
  static Pose translation(const Vec3& t) {
    return Pose(Eigen::Quaterniond::Identity(), t);
  }
  static Pose rotation(const Eigen::AngleAxisd& aa) {
    return Pose(Eigen::Quaterniond(aa), Vec3::Zero());
  }

  const Eigen::Quaterniond& quat() const { return q_; }
  const Vec3& trans() const { return t_; }
  Mat3 rot() const { return q_.toRotationMatrix(); }
  Eigen::Matrix4d matrix() const;

  // JSON wire format: [qw, qx, qy, qz, tx, ty, tz].
  std::array<double, 7> coeffs() const;
  static Pose from_coeffs(const std::array<double, 7>& c);

 private:
  Eigen::Quaterniond q_;
  Vec3 t_;
};

Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& p);
Vec3 act(const Pose& p, const Vec3& x);

// Exponential map of a twist; rotation via Rodrigues, translation through
// the left Jacobian V.
Pose exp_map(const Twist& xi);

// Inverse of exp_map. Throws LogNearPi when the rotation angle is within
// 1e-6 of pi, where the axis is not recoverable.
Twist log_map(const Pose& p);

// Right-multiplicative local update: retract(p, xi) = compose(p, exp(xi)).
// This is the perturbation convention used by all solver Jacobians.
inline Pose retract(const Pose& p, const Twist& xi) {
  return compose(p, exp_map(xi));
}

double rotation_angle(const Pose& p);

Mat3 skew(const Vec3& v);

}  // namespace tacgraph
