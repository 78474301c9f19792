#include "tacgraph/icp.hpp"

#include <Eigen/Cholesky>
#include <limits>

#include "tacgraph/errors.hpp"

namespace tacgraph {

namespace {

struct Correspondences {
  double fitness = std::numeric_limits<double>::max();
  int inliers = 0;
  Mat6 AtA = Mat6::Zero();
  Vec6 Atb = Vec6::Zero();
};

// Accumulates point-to-plane normal equations at pose T. Residual per point:
// n . (T p - q) with q the exact closest surface point and n the feature
// pseudo-normal there. Jacobian is taken for a left perturbation exp(xi) T.
Correspondences gather(const PointCloud& source, const TriangleMesh& target,
                       const Pose& T, double max_corr_dist) {
  Correspondences c;
  double dist_sum = 0.0;
  for (const auto& p : source.points) {
    const Vec3 y = act(T, p);
    const ClosestPoint cp = target.closest_point(y);
    if (cp.distance > max_corr_dist) continue;
    const Vec3& n = cp.feature_normal;
    const double r = n.dot(y - cp.point);
    Vec6 J;
    J.head<3>() = y.cross(n);  // d/d(omega): -n^T [y]x
    J.tail<3>() = n;
    c.AtA += J * J.transpose();
    c.Atb += J * r;
    dist_sum += cp.distance;
    ++c.inliers;
  }
  if (c.inliers > 0) c.fitness = dist_sum / c.inliers;
  return c;
}

}  // namespace

IcpResult icp_register(const PointCloud& source, const TriangleMesh& target,
                       const Pose& init, const IcpParams& params) {
  if (source.empty()) throw Error("icp_register: empty source cloud");
  if (params.max_iters < 1) throw Error("icp_register: max_iters must be >= 1");

  IcpResult result;
  result.pose = init;
  Correspondences cur = gather(source, target, init, params.max_corr_dist);
  result.fitness = cur.fitness;

  for (int it = 0; it < params.max_iters; ++it) {
    if (cur.inliers < 3) break;  // not enough constraints to move
    // Tikhonov floor keeps underdetermined directions (planar patches) put.
    Mat6 A = cur.AtA;
    const double damp = 1e-9 * A.trace() + 1e-12;
    A.diagonal().array() += damp;
    const Vec6 xi = A.ldlt().solve(-cur.Atb);
    if (!xi.allFinite()) break;

    const Pose candidate = compose(exp_map(xi), result.pose);
    const Correspondences next =
        gather(source, target, candidate, params.max_corr_dist);
    if (next.fitness > cur.fitness) break;  // reject worsening step

    result.pose = candidate;
    result.iterations = it + 1;
    const double change = cur.fitness - next.fitness;
    cur = next;
    result.fitness = cur.fitness;
    if (cur.fitness < 1e-15 ||
        change < params.tol * std::max(cur.fitness, 1e-12)) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace tacgraph
