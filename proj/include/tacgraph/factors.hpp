#pragma once

#include <Eigen/Core>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "tacgraph/mesh.hpp"
#include "tacgraph/pose.hpp"

namespace tacgraph {

enum class VariableKind { RestPose, ContactPoint, ContactForce };

struct VariableKey {
  VariableKind kind = VariableKind::RestPose;
  int t = 0;  // timestep; unused for the (time-invariant) rest pose

  static VariableKey rest_pose() { return {VariableKind::RestPose, 0}; }
  static VariableKey contact_point(int t) { return {VariableKind::ContactPoint, t}; }
  static VariableKey contact_force(int t) { return {VariableKind::ContactForce, t}; }

  int tangent_dim() const { return kind == VariableKind::RestPose ? 6 : 3; }
  auto operator<=>(const VariableKey&) const = default;
};

// Per-timestep observation bundle (g_t, delta_t, w_t, b_t).
struct TimestepObservation {
  Pose gripper_pose;               // g_t, world frame
  Pose delta;                      // delta_t: in-hand displacement, gripper frame
  Wrench wrench = Wrench::Zero();  // w_t at the grasp, gripper frame
  bool contact = false;            // b_t

  // Sanity bound on the elastic-grasp assumption: delta stays a small
  // displacement (rotation <= 0.5 rad, translation <= 0.05 m).
  void validate() const;
};

// Diagonal noise, stored as standard deviations in native residual units.
// Whitening divides each residual row by its sigma.
struct NoiseModel {
  double sigma_h1 = 0.002;         // m
  double sigma_h2 = 0.001;         // m
  double sigma_h3 = 0.001;         // m
  double sigma_h4_force = 0.3;     // N
  double sigma_h4_torque = 0.03;   // N*m
  // Covariance used only for contact detection; kept separate from h4.
  Vec6 contact_detect_sigma = (Vec6() << 0.1, 0.1, 0.1, 0.01, 0.01, 0.01).finished();

  void validate() const;
};

// Estimate for every variable in the graph. Contact point (m, world) and
// force (N, world) are stored as a pair so c_t and f_t exist together or
// not at all.
class Values {
 public:
  void set_rest_pose(const Pose& p) { rest_pose_ = p; }
  void set_contact(int t, const Vec3& point, const Vec3& force) {
    contacts_[t] = {point, force};
  }

  const Pose& rest_pose() const;            // throws MissingVariable
  const Vec3& contact_point(int t) const;   // throws MissingVariable
  const Vec3& contact_force(int t) const;
  bool has_rest_pose() const { return rest_pose_.has_value(); }
  bool has_contact(int t) const { return contacts_.count(t) > 0; }
  std::vector<int> contact_timesteps() const;

 private:
  std::optional<Pose> rest_pose_;
  std::map<int, std::pair<Vec3, Vec3>> contacts_;
};

// Eq-1 pose chain: o_t = g_t * delta_t * o_r.
Pose object_pose_at(const Pose& rest_pose, const TimestepObservation& obs);

// Wrench at the grasp implied by a world-frame force at a world-frame
// contact: with p = g^-1 c and f_g the force rotated into the gripper
// frame, returns [f_g; p x f_g].
Wrench contact_jacobian_wrench(const Vec3& contact_world, const Vec3& force_world,
                               const Pose& gripper_pose);

// b_t test: Mahalanobis norm of the wrench under the contact-detection
// covariance, strictly greater than epsilon.
bool detect_contact(const Wrench& w, const NoiseModel& noise, double epsilon);

// One residual block of the MAP objective. error() returns the raw
// (unwhitened) residual; Jacobian blocks follow keys() order and use the
// right-perturbation convention for the pose variable.
class Factor {
 public:
  virtual ~Factor() = default;
  virtual int dim() const = 0;
  virtual const std::vector<VariableKey>& keys() const = 0;
  virtual const Eigen::VectorXd& sigmas() const = 0;  // length dim()
  virtual Eigen::VectorXd error(const Values& values,
                                std::vector<Eigen::MatrixXd>* jacobians = nullptr) const = 0;

  // || error ./ sigmas ||^2
  double whitened_cost(const Values& values) const;
};

// h1: signed distance of every initial-cloud point, mapped into the object
// frame by the rest pose, to the object surface.
class GeometricConsistencyFactor final : public Factor {
 public:
  GeometricConsistencyFactor(MeshPtr object, const PointCloud& cloud, double sigma);
  int dim() const override { return static_cast<int>(cloud_.size()); }
  const std::vector<VariableKey>& keys() const override { return keys_; }
  const Eigen::VectorXd& sigmas() const override { return sigmas_; }
  Eigen::VectorXd error(const Values& values,
                        std::vector<Eigen::MatrixXd>* jacobians) const override;

 private:
  MeshPtr object_;
  PointCloud cloud_;
  std::vector<VariableKey> keys_;
  Eigen::VectorXd sigmas_;
};

// h2: for each posed object-surface sample, min(0, SDF against the
// environment). Jacobian rows are zero wherever the residual is zero.
class NonPenetrationFactor final : public Factor {
 public:
  NonPenetrationFactor(MeshPtr environment, std::shared_ptr<const PointCloud> object_samples,
                       const TimestepObservation& obs, double sigma);
  int dim() const override { return static_cast<int>(samples_->size()); }
  const std::vector<VariableKey>& keys() const override { return keys_; }
  const Eigen::VectorXd& sigmas() const override { return sigmas_; }
  Eigen::VectorXd error(const Values& values,
                        std::vector<Eigen::MatrixXd>* jacobians) const override;

 private:
  MeshPtr environment_;
  std::shared_ptr<const PointCloud> samples_;
  TimestepObservation obs_;
  std::vector<VariableKey> keys_;
  Eigen::VectorXd sigmas_;
};

// h3: [SDF(c_t | env); SDF(o_t^-1 c_t | object)] -- the contact point must
// lie on both surfaces.
class ContactKinematicsFactor final : public Factor {
 public:
  ContactKinematicsFactor(MeshPtr environment, MeshPtr object,
                          const TimestepObservation& obs, int t, double sigma);
  int dim() const override { return 2; }
  const std::vector<VariableKey>& keys() const override { return keys_; }
  const Eigen::VectorXd& sigmas() const override { return sigmas_; }
  Eigen::VectorXd error(const Values& values,
                        std::vector<Eigen::MatrixXd>* jacobians) const override;

 private:
  MeshPtr environment_;
  MeshPtr object_;
  TimestepObservation obs_;
  int t_;
  std::vector<VariableKey> keys_;
  Eigen::VectorXd sigmas_;
};

// h4: predicted minus observed grasp wrench.
class ForceBalanceFactor final : public Factor {
 public:
  ForceBalanceFactor(const TimestepObservation& obs, int t, double sigma_force,
                     double sigma_torque);
  int dim() const override { return 6; }
  const std::vector<VariableKey>& keys() const override { return keys_; }
  const Eigen::VectorXd& sigmas() const override { return sigmas_; }
  Eigen::VectorXd error(const Values& values,
                        std::vector<Eigen::MatrixXd>* jacobians) const override;

 private:
  TimestepObservation obs_;
  int t_;
  std::vector<VariableKey> keys_;
  Eigen::VectorXd sigmas_;
};

// The MAP problem for one estimation run: geometry, observation stream,
// noise, and the factor list. Geometry is shared and immutable; one state
// instance belongs to one solver/hypothesis.
class FactorGraphState {
 public:
  FactorGraphState(MeshPtr object, MeshPtr environment, PointCloud initial_cloud,
                   PointCloud object_samples, NoiseModel noise);

  // Appends the observation and its factors (h2 always; h3 + h4 when b_t).
  // Returns the timestep index.
  int add_observation(const TimestepObservation& obs);

  const TriangleMesh& object() const { return *object_; }
  const TriangleMesh& environment() const { return *environment_; }
  MeshPtr object_ptr() const { return object_; }
  MeshPtr environment_ptr() const { return environment_; }
  const PointCloud& initial_cloud() const { return initial_cloud_; }
  const PointCloud& object_samples() const { return *object_samples_; }
  const std::vector<TimestepObservation>& observations() const { return observations_; }
  const NoiseModel& noise() const { return noise_; }
  const std::vector<std::unique_ptr<Factor>>& factors() const { return factors_; }

 private:
  MeshPtr object_;
  MeshPtr environment_;
  PointCloud initial_cloud_;
  std::shared_ptr<const PointCloud> object_samples_;
  NoiseModel noise_;
  std::vector<TimestepObservation> observations_;
  std::vector<std::unique_ptr<Factor>> factors_;
};

// Eq-3 objective: sum of whitened squared residuals over all factors.
// Throws MissingVariable if a contact timestep lacks its variables.
double total_cost(const FactorGraphState& state, const Values& values);

}  // namespace tacgraph
