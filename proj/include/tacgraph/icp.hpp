#pragma once

#include "tacgraph/mesh.hpp"
#include "tacgraph/pose.hpp"

namespace tacgraph {

struct IcpParams {
  int max_iters = 50;
  double tol = 1e-8;              // relative residual change
  double max_corr_dist = 0.05;    // correspondence rejection (m)
};

struct IcpResult {
  Pose pose;          // maps source points onto the target surface
  double fitness = 0; // mean distance to closest surface point (m), inliers
  int iterations = 0;
  bool converged = false;
};

// Point-to-plane ICP of a point cloud against a triangle mesh, with exact
// closest-point-on-mesh correspondences. Never fails: returns the best pose
// seen with its fitness. The fitness trace over accepted iterations is
// non-increasing (worsening steps are rejected and terminate the loop).
IcpResult icp_register(const PointCloud& source, const TriangleMesh& target,
                       const Pose& init, const IcpParams& params = {});

}  // namespace tacgraph
