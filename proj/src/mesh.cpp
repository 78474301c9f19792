#include "tacgraph/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "tacgraph/errors.hpp"
#include "tacgraph/rng.hpp"

namespace tacgraph {

Vec3 PointCloud::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const auto& p : points) c += p;
  return points.empty() ? c : Vec3(c / static_cast<double>(points.size()));
}

PointCloud PointCloud::transformed(const Pose& p, Frame new_frame) const {
  PointCloud out;
  out.frame = new_frame;
  out.points.reserve(points.size());
  for (const auto& x : points) out.points.push_back(act(p, x));
  return out;
}

namespace {

constexpr double kDegenerateArea = 1e-14;  // m^2

struct TriClosest {
  Vec3 point;
  FeatureKind kind;
  int i0, i1;     // local vertex indices of the feature (vertex: i0)
  double margin;  // in-plane distance from point to the face boundary
};

// Closest point on triangle abc to p, with the Voronoi region it fell in
// (Ericson, Real-Time Collision Detection 5.1.5). The region identifies the
// feature whose pseudo-normal decides the SDF sign.
TriClosest closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                     const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {a, FeatureKind::Vertex, 0, 0, 0.0};

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return {b, FeatureKind::Vertex, 1, 1, 0.0};

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return {a + v * ab, FeatureKind::Edge, 0, 1, 0.0};
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return {c, FeatureKind::Vertex, 2, 2, 0.0};

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return {a + w * ac, FeatureKind::Edge, 0, 2, 0.0};
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {b + w * (c - b), FeatureKind::Edge, 1, 2, 0.0};
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom, u = 1.0 - v - w;
  const Vec3 q = a + ab * v + ac * w;
  // Barycentric-to-metric margin: distance to edge opposite vertex i is
  // bary_i * 2*area / |edge_i|.
  const double area2 = ab.cross(ac).norm();
  const double m_u = u * area2 / (c - b).norm();
  const double m_v = v * area2 / ac.norm();
  const double m_w = w * area2 / ab.norm();
  return {q, FeatureKind::Face, 0, 0, std::min({m_u, m_v, m_w})};
}

double aabb_sq_distance(const Vec3& q, const Vec3& lo, const Vec3& hi) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double v = q[i] < lo[i] ? lo[i] - q[i] : (q[i] > hi[i] ? q[i] - hi[i] : 0.0);
    d2 += v * v;
  }
  return d2;
}

}  // namespace

std::uint64_t TriangleMesh::edge_key(int a, int b) {
  const std::uint64_t lo = static_cast<std::uint32_t>(std::min(a, b));
  const std::uint64_t hi = static_cast<std::uint32_t>(std::max(a, b));
  return (hi << 32) | lo;
}

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces,
                           LoadReport* report) {
  vertices_ = std::move(vertices);
  const int nv = static_cast<int>(vertices_.size());
  if (nv < 3) throw ParseError("mesh has fewer than 3 vertices");

  int removed = 0;
  faces_.reserve(faces.size());
  for (const Face& f : faces) {
    for (int idx : f) {
      if (idx < 0 || idx >= nv)
        throw ParseError("face index out of range: " + std::to_string(idx));
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
      throw DegenerateFace("face repeats a vertex index");
    const Vec3& a = vertices_[f[0]];
    const double area =
        0.5 * (vertices_[f[1]] - a).cross(vertices_[f[2]] - a).norm();
    if (area < kDegenerateArea) {
      ++removed;
      continue;
    }
    faces_.push_back(f);
  }
  if (report) report->degenerate_faces_removed = removed;
  if (faces_.empty()) throw ParseError("mesh has no non-degenerate faces");

  build_adjacency_and_normals();
  build_bvh();
}

void TriangleMesh::build_adjacency_and_normals() {
  const int nf = static_cast<int>(faces_.size());

  // Edge pairing: every undirected edge must carry exactly one edge in each
  // direction, i.e. two incident faces with opposite winding.
  std::unordered_map<std::uint64_t, std::pair<int, int>> edge_count;  // (fwd, rev)
  edge_count.reserve(static_cast<std::size_t>(nf) * 3);
  for (const Face& f : faces_) {
    for (int e = 0; e < 3; ++e) {
      const int a = f[e], b = f[(e + 1) % 3];
      auto& cnt = edge_count[edge_key(a, b)];
      (a < b ? cnt.first : cnt.second) += 1;
    }
  }
  for (const auto& [key, cnt] : edge_count) {
    if (cnt.first + cnt.second != 2)
      throw NonWatertight(cnt.first + cnt.second == 1
                              ? "boundary edge found"
                              : "edge shared by more than two faces");
    if (cnt.first != 1)
      throw NonWatertight("inconsistent winding across an edge");
  }

  face_normals_.resize(nf);
  face_areas_.resize(nf);
  total_area_ = 0.0;
  double signed_volume = 0.0;
  for (int i = 0; i < nf; ++i) {
    const Vec3& a = vertices_[faces_[i][0]];
    const Vec3& b = vertices_[faces_[i][1]];
    const Vec3& c = vertices_[faces_[i][2]];
    const Vec3 n = (b - a).cross(c - a);
    face_areas_[i] = 0.5 * n.norm();
    face_normals_[i] = n.normalized();
    total_area_ += face_areas_[i];
    signed_volume += a.dot(b.cross(c)) / 6.0;
  }
  if (signed_volume <= 0.0)
    throw NonWatertight("mesh is inside-out (negative enclosed volume)");

  area_cdf_.resize(nf);
  std::partial_sum(face_areas_.begin(), face_areas_.end(), area_cdf_.begin());

  // Angle-weighted vertex pseudo-normals and edge pseudo-normals
  // (Baerentzen & Aanaes).
  vertex_normals_.assign(vertices_.size(), Vec3::Zero());
  edge_normals_.clear();
  edge_normals_.reserve(edge_count.size());
  for (int i = 0; i < nf; ++i) {
    const Face& f = faces_[i];
    for (int e = 0; e < 3; ++e) {
      const Vec3& v = vertices_[f[e]];
      const Vec3 u1 = (vertices_[f[(e + 1) % 3]] - v).normalized();
      const Vec3 u2 = (vertices_[f[(e + 2) % 3]] - v).normalized();
      const double angle = std::acos(std::clamp(u1.dot(u2), -1.0, 1.0));
      vertex_normals_[f[e]] += angle * face_normals_[i];
      edge_normals_[edge_key(f[e], f[(e + 1) % 3])] += face_normals_[i];
    }
  }
  for (auto& n : vertex_normals_)
    if (n.norm() > 0.0) n.normalize();
  for (auto& [key, n] : edge_normals_) n.normalize();

  aabb_min_ = Vec3::Constant(std::numeric_limits<double>::max());
  aabb_max_ = Vec3::Constant(std::numeric_limits<double>::lowest());
  for (const auto& v : vertices_) {
    aabb_min_ = aabb_min_.cwiseMin(v);
    aabb_max_ = aabb_max_.cwiseMax(v);
  }
}

const Vec3& TriangleMesh::edge_pseudo_normal(int v0, int v1) const {
  const auto it = edge_normals_.find(edge_key(v0, v1));
  if (it == edge_normals_.end()) throw Error("edge not present in mesh");
  return it->second;
}

void TriangleMesh::build_bvh() {
  bvh_tris_.resize(faces_.size());
  std::iota(bvh_tris_.begin(), bvh_tris_.end(), 0);
  bvh_.clear();
  bvh_.reserve(2 * faces_.size());
  build_bvh_node(0, static_cast<int>(faces_.size()));
}

int TriangleMesh::build_bvh_node(int begin, int end) {
  const int idx = static_cast<int>(bvh_.size());
  bvh_.emplace_back();
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());
  Vec3 clo = lo, chi = hi;
  for (int i = begin; i < end; ++i) {
    Vec3 c = Vec3::Zero();
    for (int v : faces_[bvh_tris_[i]]) {
      lo = lo.cwiseMin(vertices_[v]);
      hi = hi.cwiseMax(vertices_[v]);
      c += vertices_[v];
    }
    c /= 3.0;
    clo = clo.cwiseMin(c);
    chi = chi.cwiseMax(c);
  }
  bvh_[idx].lo = lo;
  bvh_[idx].hi = hi;

  const int count = end - begin;
  if (count <= 4) {
    bvh_[idx].begin = begin;
    bvh_[idx].count = count;
    return idx;
  }

  int axis = 0;
  (chi - clo).maxCoeff(&axis);
  const int mid = begin + count / 2;
  std::nth_element(bvh_tris_.begin() + begin, bvh_tris_.begin() + mid,
                   bvh_tris_.begin() + end, [&](int ta, int tb) {
                     double ca = 0.0, cb = 0.0;
                     for (int v : faces_[ta]) ca += vertices_[v][axis];
                     for (int v : faces_[tb]) cb += vertices_[v][axis];
                     return ca < cb;
                   });

  const int left = build_bvh_node(begin, mid);
  const int right = build_bvh_node(mid, end);
  bvh_[idx].left = left;
  bvh_[idx].right = right;
  return idx;
}

void TriangleMesh::closest_recurse(int node, const Vec3& q, ClosestPoint& best) const {
  const BvhNode& n = bvh_[node];
  if (aabb_sq_distance(q, n.lo, n.hi) >= best.distance * best.distance) return;

  if (n.left < 0) {
    for (int i = n.begin; i < n.begin + n.count; ++i) {
      const int t = bvh_tris_[i];
      const Face& f = faces_[t];
      const TriClosest tc = closest_point_on_triangle(
          q, vertices_[f[0]], vertices_[f[1]], vertices_[f[2]]);
      const double d = (q - tc.point).norm();
      if (d < best.distance) {
        best.distance = d;
        best.point = tc.point;
        best.face = t;
        best.feature = tc.kind;
        best.feature_margin = tc.margin;
        switch (tc.kind) {
          case FeatureKind::Face:
            best.feature_normal = face_normals_[t];
            break;
          case FeatureKind::Edge:
            best.feature_normal = edge_pseudo_normal(f[tc.i0], f[tc.i1]);
            break;
          case FeatureKind::Vertex:
            best.feature_normal = vertex_normals_[f[tc.i0]];
            break;
        }
      }
    }
    return;
  }

  // Descend the nearer child first for tighter pruning.
  const double dl = aabb_sq_distance(q, bvh_[n.left].lo, bvh_[n.left].hi);
  const double dr = aabb_sq_distance(q, bvh_[n.right].lo, bvh_[n.right].hi);
  if (dl <= dr) {
    closest_recurse(n.left, q, best);
    closest_recurse(n.right, q, best);
  } else {
    closest_recurse(n.right, q, best);
    closest_recurse(n.left, q, best);
  }
}

ClosestPoint TriangleMesh::closest_point(const Vec3& query) const {
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::max();
  closest_recurse(0, query, best);
  return best;
}

SdfResult TriangleMesh::signed_distance(const Vec3& query) const {
  const ClosestPoint cp = closest_point(query);
  const Vec3 offset = query - cp.point;
  const double dist = offset.norm();
  const double sign = offset.dot(cp.feature_normal) >= 0.0 ? 1.0 : -1.0;
  SdfResult r;
  r.value = sign * dist;
  r.closest_point = cp.point;
  // (query - closest)/value points along increasing distance on both sides
  // of the surface; on the surface itself fall back to the pseudo-normal.
  r.gradient = dist > 1e-7 ? Vec3(offset / r.value) : cp.feature_normal;
  return r;
}

std::vector<SdfResult> TriangleMesh::batch_signed_distance(
    const PointCloud& queries) const {
  std::vector<SdfResult> out;
  out.reserve(queries.size());
  for (const auto& q : queries.points) out.push_back(signed_distance(q));
  return out;
}

PointCloud TriangleMesh::sample_surface(int n, std::uint64_t seed) const {
  if (n < 1) throw Error("sample_surface: n must be >= 1");
  Rng rng(seed);
  PointCloud cloud;
  cloud.frame = Frame::Object;
  cloud.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform() * total_area_;
    const auto it = std::lower_bound(area_cdf_.begin(), area_cdf_.end(), u);
    const int f = static_cast<int>(std::min<std::ptrdiff_t>(
        it - area_cdf_.begin(), static_cast<std::ptrdiff_t>(faces_.size()) - 1));
    const double su = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const Vec3& a = vertices_[faces_[f][0]];
    const Vec3& b = vertices_[faces_[f][1]];
    const Vec3& c = vertices_[faces_[f][2]];
    cloud.points.push_back((1.0 - su) * a + su * (1.0 - r2) * b + su * r2 * c);
  }
  return cloud;
}

TriangleMesh TriangleMesh::load_obj(const std::filesystem::path& path,
                                    LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file: " + path.string());

  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ss >> v.x() >> v.y() >> v.z()))
        throw ParseError("malformed vertex at line " + std::to_string(lineno));
      vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        // "i", "i/t", "i//n", "i/t/n" all start with the vertex index.
        std::size_t pos = 0;
        int v = 0;
        try {
          v = std::stoi(tok, &pos);
        } catch (const std::exception&) {
          throw ParseError("malformed face at line " + std::to_string(lineno));
        }
        if (pos != tok.size() && tok[pos] != '/')
          throw ParseError("malformed face at line " + std::to_string(lineno));
        if (v < 1)
          throw ParseError("non-positive face index at line " +
                           std::to_string(lineno));
        idx.push_back(v - 1);
      }
      if (idx.size() < 3)
        throw ParseError("face with fewer than 3 vertices at line " +
                         std::to_string(lineno));
      for (std::size_t k = 2; k < idx.size(); ++k)
        faces.push_back({idx[0], idx[k - 1], idx[k]});
    }
    // All other records (vn, vt, o, g, s, usemtl, ...) are ignored.
  }
  if (vertices.empty() || faces.empty())
    throw ParseError("no triangle data in " + path.string());
  return TriangleMesh(std::move(vertices), std::move(faces), report);
}

}  // namespace tacgraph
