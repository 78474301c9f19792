#include "tacgraph/pose.hpp"

#include <cmath>

#include "tacgraph/errors.hpp"

namespace tacgraph {

Pose::Pose(const Eigen::Quaterniond& q, const Vec3& t) : q_(q.normalized()), t_(t) {
  if (q_.w() < 0.0) q_.coeffs() = -q_.coeffs();
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rot();
  m.topRightCorner<3, 1>() = t_;
  return m;
}

std::array<double, 7> Pose::coeffs() const {
  return {q_.w(), q_.x(), q_.y(), q_.z(), t_.x(), t_.y(), t_.z()};
}

Pose Pose::from_coeffs(const std::array<double, 7>& c) {
  return Pose(Eigen::Quaterniond(c[0], c[1], c[2], c[3]), Vec3(c[4], c[5], c[6]));
}

Pose compose(const Pose& a, const Pose& b) {
  return Pose(a.quat() * b.quat(), a.quat() * b.trans() + a.trans());
}

Pose inverse(const Pose& p) {
  const Eigen::Quaterniond qi = p.quat().conjugate();
  return Pose(qi, -(qi * p.trans()));
}

Vec3 act(const Pose& p, const Vec3& x) { return p.quat() * x + p.trans(); }

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

namespace {

// Left Jacobian of SO(3): V = I + (1-cos)/t^2 [w]x + (t-sin)/t^3 [w]x^2.
Mat3 so3_left_jacobian(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const Mat3 W = skew(w);
  if (theta2 < 1e-14) {
    return Mat3::Identity() + 0.5 * W + W * W / 6.0;
  }
  const double theta = std::sqrt(theta2);
  return Mat3::Identity() + ((1.0 - std::cos(theta)) / theta2) * W +
         ((theta - std::sin(theta)) / (theta2 * theta)) * W * W;
}

Mat3 so3_left_jacobian_inverse(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const Mat3 W = skew(w);
  double c;
  if (theta2 < 1e-10) {
    c = 1.0 / 12.0 + theta2 / 720.0;
  } else {
    const double theta = std::sqrt(theta2);
    c = 1.0 / theta2 - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  return Mat3::Identity() - 0.5 * W + c * W * W;
}

}  // namespace

Pose exp_map(const Twist& xi) {
  const Vec3 w = xi.head<3>();
  const Vec3 v = xi.tail<3>();
  const double theta = w.norm();
  Eigen::Quaterniond q;
  if (theta < 1e-10) {
    q = Eigen::Quaterniond(1.0, 0.5 * w.x(), 0.5 * w.y(), 0.5 * w.z());
  } else {
    q = Eigen::Quaterniond(Eigen::AngleAxisd(theta, w / theta));
  }
  return Pose(q, so3_left_jacobian(w) * v);
}

Twist log_map(const Pose& p) {
  const Eigen::Quaterniond& q = p.quat();  // w >= 0 by construction
  const double vec_norm = q.vec().norm();
  const double angle = 2.0 * std::atan2(vec_norm, q.w());
  if (angle >= M_PI - 1e-6) {
    throw LogNearPi("log_map: rotation angle within 1e-6 of pi");
  }
  Vec3 w;
  if (vec_norm < 1e-12) {
    w = 2.0 * q.vec();  // first-order: q ~ (1, w/2)
  } else {
    w = (angle / vec_norm) * q.vec();
  }
  Twist xi;
  xi.head<3>() = w;
  xi.tail<3>() = so3_left_jacobian_inverse(w) * p.trans();
  return xi;
}

double rotation_angle(const Pose& p) {
  return 2.0 * std::atan2(p.quat().vec().norm(), std::abs(p.quat().w()));
}

}  // namespace tacgraph
