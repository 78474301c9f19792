#include "tacgraph/solver.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tacgraph/errors.hpp"

namespace tacgraph {

void SolverParams::validate() const {
  const bool ok = max_iters > 0 && init_lambda > 0 && lambda_up > 1 &&
                  lambda_down > 0 && lambda_down < 1 && rel_cost_tol > 0 &&
                  step_tol > 0 && max_lambda > 0;
  if (!ok) throw Error("solver parameters must be positive");
}

namespace {

struct Ordering {
  std::vector<VariableKey> keys;  // sorted, deterministic
  std::map<VariableKey, int> offset;
  int total_dim = 0;
};

Ordering make_ordering(const FactorGraphState& state) {
  std::set<VariableKey> unique;
  for (const auto& f : state.factors())
    for (const auto& k : f->keys()) unique.insert(k);
  Ordering ord;
  for (const auto& k : unique) {
    ord.offset[k] = ord.total_dim;
    ord.keys.push_back(k);
    ord.total_dim += k.tangent_dim();
  }
  return ord;
}

// Whitened residual stack and Jacobian.
void linearize(const FactorGraphState& state, const Values& values,
               const Ordering& ord, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
  int rows = 0;
  for (const auto& f : state.factors()) rows += f->dim();
  r.resize(rows);
  J.setZero(rows, ord.total_dim);

  int row = 0;
  std::vector<Eigen::MatrixXd> blocks;
  for (const auto& f : state.factors()) {
    const Eigen::VectorXd err = f->error(values, &blocks);
    const Eigen::VectorXd w = f->sigmas().cwiseInverse();
    r.segment(row, f->dim()) = err.cwiseProduct(w);
    for (std::size_t k = 0; k < f->keys().size(); ++k) {
      const int col = ord.offset.at(f->keys()[k]);
      J.block(row, col, f->dim(), f->keys()[k].tangent_dim()) =
          w.asDiagonal() * blocks[k];
    }
    row += f->dim();
  }
}

Values apply_step(const Values& values, const Ordering& ord,
                  const Eigen::VectorXd& dx) {
  Values out = values;
  for (const auto& key : ord.keys) {
    const int off = ord.offset.at(key);
    switch (key.kind) {
      case VariableKind::RestPose:
        out.set_rest_pose(retract(values.rest_pose(), dx.segment<6>(off)));
        break;
      case VariableKind::ContactPoint:
        out.set_contact(key.t, values.contact_point(key.t) + dx.segment<3>(off),
                        values.contact_force(key.t));
        break;
      case VariableKind::ContactForce:
        out.set_contact(key.t, out.contact_point(key.t),
                        values.contact_force(key.t) + dx.segment<3>(off));
        break;
    }
  }
  return out;
}

}  // namespace

SolveReport solve(const FactorGraphState& state, const Values& init,
                  const SolverParams& params) {
  params.validate();
  const Ordering ord = make_ordering(state);

  SolveReport report;
  report.values = init;
  double cost = total_cost(state, init);
  report.cost_trace.push_back(cost);

  double lambda = params.init_lambda;
  Eigen::VectorXd r;
  Eigen::MatrixXd J;

  while (report.iterations < params.max_iters && !report.converged) {
    linearize(state, report.values, ord, r, J);
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;

    bool accepted = false;
    while (lambda <= params.max_lambda) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += lambda;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
      Eigen::VectorXd dx;
      bool solvable = ldlt.info() == Eigen::Success;
      if (solvable) {
        dx = ldlt.solve(-g);
        solvable = dx.allFinite();
      }
      if (solvable) {
        const Values candidate = apply_step(report.values, ord, dx);
        const double candidate_cost = total_cost(state, candidate);
        if (std::isfinite(candidate_cost) && candidate_cost <= cost) {
          const double change = cost - candidate_cost;
          report.values = candidate;
          cost = candidate_cost;
          ++report.iterations;
          report.cost_trace.push_back(cost);
          lambda = std::max(lambda * params.lambda_down, 1e-15);
          accepted = true;
          if (change <= params.rel_cost_tol * std::max(cost, 1e-300) ||
              dx.lpNorm<Eigen::Infinity>() < params.step_tol) {
            report.converged = true;
          }
          break;
        }
        lambda *= params.lambda_up;
      } else {
        lambda *= params.lambda_up;
        if (lambda > params.max_lambda)
          throw SingularSystem(
              "damped normal equations rank-deficient beyond lambda repair");
      }
    }
    if (!accepted) break;  // stationary: no decreasing step up to max lambda
  }

  report.final_cost = cost;
  return report;
}

std::pair<Vec3, Vec3> initialize_contact(const FactorGraphState& state,
                                         const Pose& rest_pose,
                                         const TimestepObservation& obs) {
  const Pose pose = object_pose_at(rest_pose, obs);
  double best = std::numeric_limits<double>::max();
  Vec3 c_init = Vec3::Zero();
  for (const auto& p : state.object_samples().points) {
    const Vec3 world = act(pose, p);
    const SdfResult sdf = state.environment().signed_distance(world);
    if (sdf.value < best) {
      best = sdf.value;
      c_init = 0.5 * (world + sdf.closest_point);
    }
  }
  const Vec3 f_init = obs.gripper_pose.rot() * obs.wrench.head<3>();
  return {c_init, f_init};
}

SolveReport extend_and_resolve(const SolveReport& prev, FactorGraphState& state,
                               const TimestepObservation& obs,
                               const SolverParams& params) {
  const int t = state.add_observation(obs);
  Values init = prev.values;
  if (obs.contact) {
    const auto [c, f] = initialize_contact(state, init.rest_pose(), obs);
    init.set_contact(t, c, f);
  }
  return solve(state, init, params);
}

}  // namespace tacgraph
