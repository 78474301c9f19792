#include "tacgraph/factors.hpp"

#include <cmath>

#include "tacgraph/errors.hpp"

namespace tacgraph {

void TimestepObservation::validate() const {
  if (rotation_angle(delta) > 0.5)
    throw Error("in-hand displacement rotation exceeds 0.5 rad");
  if (delta.trans().norm() > 0.05)
    throw Error("in-hand displacement translation exceeds 0.05 m");
}

void NoiseModel::validate() const {
  const bool ok = sigma_h1 > 0 && sigma_h2 > 0 && sigma_h3 > 0 &&
                  sigma_h4_force > 0 && sigma_h4_torque > 0 &&
                  (contact_detect_sigma.array() > 0).all();
  if (!ok) throw Error("noise model requires positive variances");
}

const Pose& Values::rest_pose() const {
  if (!rest_pose_) throw MissingVariable("rest pose not set");
  return *rest_pose_;
}

const Vec3& Values::contact_point(int t) const {
  const auto it = contacts_.find(t);
  if (it == contacts_.end())
    throw MissingVariable("contact point missing for t=" + std::to_string(t));
  return it->second.first;
}

const Vec3& Values::contact_force(int t) const {
  const auto it = contacts_.find(t);
  if (it == contacts_.end())
    throw MissingVariable("contact force missing for t=" + std::to_string(t));
  return it->second.second;
}

std::vector<int> Values::contact_timesteps() const {
  std::vector<int> ts;
  ts.reserve(contacts_.size());
  for (const auto& [t, cf] : contacts_) ts.push_back(t);
  return ts;
}

Pose object_pose_at(const Pose& rest_pose, const TimestepObservation& obs) {
  return compose(obs.gripper_pose, compose(obs.delta, rest_pose));
}

Wrench contact_jacobian_wrench(const Vec3& contact_world, const Vec3& force_world,
                               const Pose& gripper_pose) {
  const Mat3 Rt = gripper_pose.rot().transpose();
  const Vec3 p = Rt * (contact_world - gripper_pose.trans());
  const Vec3 f = Rt * force_world;
  Wrench w;
  w.head<3>() = f;
  w.tail<3>() = p.cross(f);
  return w;
}

bool detect_contact(const Wrench& w, const NoiseModel& noise, double epsilon) {
  if (epsilon <= 0) throw Error("detect_contact: epsilon must be positive");
  const double m = (w.array() / noise.contact_detect_sigma.array()).matrix().norm();
  return m > epsilon;
}

double Factor::whitened_cost(const Values& values) const {
  const Eigen::VectorXd r = error(values);
  return (r.array() / sigmas().array()).square().sum();
}

// ---------------------------------------------------------------------------
// h1

GeometricConsistencyFactor::GeometricConsistencyFactor(MeshPtr object,
                                                       const PointCloud& cloud,
                                                       double sigma)
    : object_(std::move(object)), cloud_(cloud) {
  if (cloud_.empty()) throw Error("h1 requires a non-empty point cloud");
  if (cloud_.frame != Frame::Gripper)
    throw Error("h1 cloud must be expressed in the t=0 gripper frame");
  keys_ = {VariableKey::rest_pose()};
  sigmas_ = Eigen::VectorXd::Constant(dim(), sigma);
}

Eigen::VectorXd GeometricConsistencyFactor::error(
    const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const Pose inv_rest = inverse(values.rest_pose());
  const int n = dim();
  Eigen::VectorXd r(n);
  if (jacobians) {
    jacobians->assign(1, Eigen::MatrixXd::Zero(n, 6));
  }
  for (int i = 0; i < n; ++i) {
    const Vec3 z = act(inv_rest, cloud_.points[i]);
    const SdfResult sdf = object_->signed_distance(z);
    r(i) = sdf.value;
    if (jacobians) {
      // z = exp(-xi) o_r^-1 P_i to first order: dz/dw = [z]x, dz/dv = -I.
      (*jacobians)[0].block<1, 3>(i, 0) = sdf.gradient.transpose() * skew(z);
      (*jacobians)[0].block<1, 3>(i, 3) = -sdf.gradient.transpose();
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// h2

NonPenetrationFactor::NonPenetrationFactor(
    MeshPtr environment, std::shared_ptr<const PointCloud> object_samples,
    const TimestepObservation& obs, double sigma)
    : environment_(std::move(environment)),
      samples_(std::move(object_samples)),
      obs_(obs) {
  if (!samples_ || samples_->empty()) throw Error("h2 requires object samples");
  if (samples_->frame != Frame::Object)
    throw Error("h2 object samples must be in the object frame");
  keys_ = {VariableKey::rest_pose()};
  sigmas_ = Eigen::VectorXd::Constant(dim(), sigma);
}

Eigen::VectorXd NonPenetrationFactor::error(
    const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const Pose pose = object_pose_at(values.rest_pose(), obs_);
  const Mat3 R = pose.rot();
  const int n = dim();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  if (jacobians) jacobians->assign(1, Eigen::MatrixXd::Zero(n, 6));
  for (int i = 0; i < n; ++i) {
    const Vec3& p = samples_->points[i];
    const SdfResult sdf = environment_->signed_distance(act(pose, p));
    if (sdf.value >= 0.0) continue;  // no penetration, zero row
    r(i) = sdf.value;
    if (jacobians) {
      // A right perturbation of o_r is a right perturbation of o_t.
      (*jacobians)[0].block<1, 3>(i, 0) = -sdf.gradient.transpose() * R * skew(p);
      (*jacobians)[0].block<1, 3>(i, 3) = sdf.gradient.transpose() * R;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// h3

ContactKinematicsFactor::ContactKinematicsFactor(MeshPtr environment, MeshPtr object,
                                                 const TimestepObservation& obs,
                                                 int t, double sigma)
    : environment_(std::move(environment)), object_(std::move(object)), obs_(obs), t_(t) {
  keys_ = {VariableKey::rest_pose(), VariableKey::contact_point(t)};
  sigmas_ = Eigen::VectorXd::Constant(2, sigma);
}

Eigen::VectorXd ContactKinematicsFactor::error(
    const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const Vec3& c = values.contact_point(t_);
  const Pose pose = object_pose_at(values.rest_pose(), obs_);
  const Pose pose_inv = inverse(pose);
  const Vec3 y = act(pose_inv, c);

  const SdfResult env_sdf = environment_->signed_distance(c);
  const SdfResult obj_sdf = object_->signed_distance(y);
  Eigen::VectorXd r(2);
  r << env_sdf.value, obj_sdf.value;

  if (jacobians) {
    jacobians->assign(2, Eigen::MatrixXd());
    Eigen::MatrixXd& Jpose = (*jacobians)[0];
    Eigen::MatrixXd& Jc = (*jacobians)[1];
    Jpose = Eigen::MatrixXd::Zero(2, 6);
    Jc = Eigen::MatrixXd::Zero(2, 3);

    Jc.row(0) = env_sdf.gradient.transpose();
    // y = exp(-xi) o_t^-1 c: dy/dw = [y]x, dy/dv = -I, dy/dc = R^T.
    Jpose.block<1, 3>(1, 0) = obj_sdf.gradient.transpose() * skew(y);
    Jpose.block<1, 3>(1, 3) = -obj_sdf.gradient.transpose();
    Jc.row(1) = obj_sdf.gradient.transpose() * pose.rot().transpose();
  }
  return r;
}

// ---------------------------------------------------------------------------
// h4

ForceBalanceFactor::ForceBalanceFactor(const TimestepObservation& obs, int t,
                                       double sigma_force, double sigma_torque)
    : obs_(obs), t_(t) {
  keys_ = {VariableKey::contact_point(t), VariableKey::contact_force(t)};
  sigmas_.resize(6);
  sigmas_ << sigma_force, sigma_force, sigma_force, sigma_torque, sigma_torque,
      sigma_torque;
}

Eigen::VectorXd ForceBalanceFactor::error(
    const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const Vec3& c = values.contact_point(t_);
  const Vec3& f = values.contact_force(t_);
  const Wrench predicted = contact_jacobian_wrench(c, f, obs_.gripper_pose);
  Eigen::VectorXd r = predicted - obs_.wrench;

  if (jacobians) {
    const Mat3 Rt = obs_.gripper_pose.rot().transpose();
    const Vec3 p = Rt * (c - obs_.gripper_pose.trans());
    const Vec3 fg = Rt * f;
    jacobians->assign(2, Eigen::MatrixXd::Zero(6, 3));
    (*jacobians)[0].bottomRows<3>() = -skew(fg) * Rt;  // d/dc
    (*jacobians)[1].topRows<3>() = Rt;                 // d/df
    (*jacobians)[1].bottomRows<3>() = skew(p) * Rt;
  }
  return r;
}

// ---------------------------------------------------------------------------

FactorGraphState::FactorGraphState(MeshPtr object, MeshPtr environment,
                                   PointCloud initial_cloud, PointCloud object_samples,
                                   NoiseModel noise)
    : object_(std::move(object)),
      environment_(std::move(environment)),
      initial_cloud_(std::move(initial_cloud)),
      noise_(noise) {
  noise_.validate();
  if (object_samples.frame != Frame::Object)
    throw Error("object samples must be in the object frame");
  for (const auto& p : object_samples.points) {
    if (std::abs(object_->signed_distance(p).value) > 1e-9)
      throw Error("object sample does not lie on the object surface");
  }
  object_samples_ = std::make_shared<const PointCloud>(std::move(object_samples));
  factors_.push_back(std::make_unique<GeometricConsistencyFactor>(
      object_, initial_cloud_, noise_.sigma_h1));
}

int FactorGraphState::add_observation(const TimestepObservation& obs) {
  obs.validate();
  const int t = static_cast<int>(observations_.size());
  observations_.push_back(obs);
  factors_.push_back(std::make_unique<NonPenetrationFactor>(
      environment_, object_samples_, obs, noise_.sigma_h2));
  if (obs.contact) {
    factors_.push_back(std::make_unique<ContactKinematicsFactor>(
        environment_, object_, obs, t, noise_.sigma_h3));
    factors_.push_back(std::make_unique<ForceBalanceFactor>(
        obs, t, noise_.sigma_h4_force, noise_.sigma_h4_torque));
  }
  return t;
}

double total_cost(const FactorGraphState& state, const Values& values) {
  double cost = 0.0;
  for (const auto& f : state.factors()) cost += f->whitened_cost(values);
  return cost;
}

}  // namespace tacgraph
