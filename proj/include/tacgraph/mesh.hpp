#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "tacgraph/pose.hpp"

namespace tacgraph {

// Frame a point cloud is expressed in. Checked at the call sites that care.
enum class Frame { World, Gripper, Object };

struct PointCloud {
  std::vector<Vec3> points;
  Frame frame = Frame::World;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  Vec3 centroid() const;
  PointCloud transformed(const Pose& p, Frame new_frame) const;
};

struct SdfResult {
  double value = 0.0;      // signed distance, negative inside (m)
  Vec3 gradient;           // d(value)/d(query), unit norm
  Vec3 closest_point;      // on the surface
};

// Which mesh feature the closest point lies on.
enum class FeatureKind { Face, Edge, Vertex };

struct ClosestPoint {
  Vec3 point;
  double distance = 0.0;
  int face = -1;
  FeatureKind feature = FeatureKind::Face;
  Vec3 feature_normal;       // angle-weighted pseudo-normal of the feature
  double feature_margin = 0; // distance from the point to its face's boundary
};

struct LoadReport {
  int degenerate_faces_removed = 0;
};

// Watertight indexed triangle surface with precomputed angle-weighted
// pseudo-normals and a BVH for exact nearest-triangle queries. Immutable
// after construction; all queries are const and thread-safe.
class TriangleMesh {
 public:
  using Face = std::array<int, 3>;

  // Validates: indices in range, watertight (every edge shared by exactly
  // two faces with opposite winding), no degenerate faces after cleanup.
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces,
               LoadReport* report = nullptr);

  // Wavefront OBJ, v/f records only. 1-based indices per the format.
  static TriangleMesh load_obj(const std::filesystem::path& path,
                               LoadReport* report = nullptr);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_faces() const { return faces_.size(); }
  const Vec3& face_normal(int f) const { return face_normals_[f]; }
  double face_area(int f) const { return face_areas_[f]; }
  double total_area() const { return total_area_; }
  const Vec3& vertex_pseudo_normal(int v) const { return vertex_normals_[v]; }
  const Vec3& edge_pseudo_normal(int v0, int v1) const;

  // Exact closest point on the surface (BVH-accelerated, no approximation).
  ClosestPoint closest_point(const Vec3& query) const;

  // Signed distance with sign from the closest feature's pseudo-normal.
  // gradient = (query - closest_point) / value away from the surface; at
  // |value| <= 1e-7 m the feature pseudo-normal is returned instead.
  SdfResult signed_distance(const Vec3& query) const;

  std::vector<SdfResult> batch_signed_distance(const PointCloud& queries) const;

  // Area-weighted uniform surface samples; deterministic for a fixed seed.
  PointCloud sample_surface(int n, std::uint64_t seed) const;

  Vec3 aabb_min() const { return aabb_min_; }
  Vec3 aabb_max() const { return aabb_max_; }

 private:
  struct BvhNode {
    Vec3 lo, hi;
    int left = -1, right = -1;  // children, or -1 for leaves
    int begin = 0, count = 0;   // triangle range for leaves
  };

  void build_adjacency_and_normals();
  void build_bvh();
  int build_bvh_node(int begin, int end);
  void closest_recurse(int node, const Vec3& q, ClosestPoint& best) const;
  static std::uint64_t edge_key(int a, int b);

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Vec3> face_normals_;
  std::vector<double> face_areas_;
  std::vector<double> area_cdf_;
  double total_area_ = 0.0;
  std::vector<Vec3> vertex_normals_;
  std::unordered_map<std::uint64_t, Vec3> edge_normals_;
  std::vector<BvhNode> bvh_;
  std::vector<int> bvh_tris_;
  Vec3 aabb_min_, aabb_max_;
};

using MeshPtr = std::shared_ptr<const TriangleMesh>;

}  // namespace tacgraph
