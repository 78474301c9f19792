#pragma once

#include "tacgraph/factors.hpp"

namespace tacgraph {

struct SolverParams {
  int max_iters = 100;
  double init_lambda = 1e-4;
  double lambda_up = 10.0;
  double lambda_down = 0.1;
  double rel_cost_tol = 1e-9;   // relative cost change
  double step_tol = 1e-10;      // max tangent step
  double max_lambda = 1e8;

  void validate() const;
};

struct SolveReport {
  Values values;
  double final_cost = 0.0;
  int iterations = 0;      // accepted steps
  bool converged = false;
  std::vector<double> cost_trace;  // initial cost, then one entry per accepted step
};

// Levenberg-Marquardt on the whitened residual stack. Poses update by right
// retraction, vector variables additively; accepted steps never increase
// the cost. Dense normal equations with plain lambda*I damping. Throws
// SingularSystem when the damped system stays unsolvable up to max_lambda.
SolveReport solve(const FactorGraphState& state, const Values& init,
                  const SolverParams& params = {});

// Initialization for a newly detected contact: the midpoint of the closest
// pair between the posed object samples and the environment, and the
// observed grasp force rotated to the world frame.
std::pair<Vec3, Vec3> initialize_contact(const FactorGraphState& state,
                                         const Pose& rest_pose,
                                         const TimestepObservation& obs);

// Appends one timestep to the state (creating its factors), warm-starts
// from the previous solution plus fresh contact initializations, and
// re-solves the full graph.
SolveReport extend_and_resolve(const SolveReport& prev, FactorGraphState& state,
                               const TimestepObservation& obs,
                               const SolverParams& params = {});

}  // namespace tacgraph
