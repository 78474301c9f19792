#include "tacgraph/shapes.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "tacgraph/errors.hpp"

namespace tacgraph {

namespace {

using Vec2 = Eigen::Vector2d;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  const double d1 = cross2(b - a, p - a);
  const double d2 = cross2(c - b, p - b);
  const double d3 = cross2(a - c, p - c);
  return d1 > 0.0 && d2 > 0.0 && d3 > 0.0;
}

// Ear clipping for simple polygons; input must be CCW.
std::vector<std::array<int, 3>> triangulate(const std::vector<Vec2>& poly) {
  std::vector<int> idx(poly.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::array<int, 3>> tris;
  while (idx.size() > 3) {
    bool clipped = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const int ia = idx[(i + idx.size() - 1) % idx.size()];
      const int ib = idx[i];
      const int ic = idx[(i + 1) % idx.size()];
      const Vec2 &a = poly[ia], &b = poly[ib], &c = poly[ic];
      if (cross2(b - a, c - b) <= 1e-16) continue;  // reflex or collinear
      bool ear = true;
      for (int j : idx) {
        if (j == ia || j == ib || j == ic) continue;
        if (point_in_triangle(poly[j], a, b, c)) {
          ear = false;
          break;
        }
      }
      if (ear) {
        tris.push_back({ia, ib, ic});
        idx.erase(idx.begin() + i);
        clipped = true;
        break;
      }
    }
    if (!clipped) throw Error("polygon triangulation failed (not simple or CCW?)");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

}  // namespace

TriangleMesh make_box(double sx, double sy, double sz, const Vec3& center) {
  const double hx = sx / 2, hy = sy / 2, hz = sz / 2;
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) {
    v.push_back(center + Vec3(i & 1 ? hx : -hx, i & 2 ? hy : -hy, i & 4 ? hz : -hz));
  }
  // Two triangles per face, outward winding.
  const std::vector<TriangleMesh::Face> f = {
      {0, 2, 3}, {0, 3, 1},  // z-
      {4, 5, 7}, {4, 7, 6},  // z+
      {0, 1, 5}, {0, 5, 4},  // y-
      {2, 6, 7}, {2, 7, 3},  // y+
      {0, 4, 6}, {0, 6, 2},  // x-
      {1, 3, 7}, {1, 7, 5},  // x+
  };
  return TriangleMesh(std::move(v), f);
}

TriangleMesh make_unit_cube() { return make_box(1.0, 1.0, 1.0); }

TriangleMesh make_tetrahedron(double scale) {
  const double s = scale;
  std::vector<Vec3> v = {
      {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  const std::vector<TriangleMesh::Face> f = {
      {0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
  return TriangleMesh(std::move(v), f);
}

TriangleMesh make_cylinder(double radius, double height, int segments) {
  const double hz = height / 2;
  std::vector<Vec3> v;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * M_PI * i / segments;
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), -hz);
  }
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * M_PI * i / segments;
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), hz);
  }
  const int cb = static_cast<int>(v.size());
  v.emplace_back(0, 0, -hz);
  const int ct = cb + 1;
  v.emplace_back(0, 0, hz);

  std::vector<TriangleMesh::Face> f;
  for (int i = 0; i < segments; ++i) {
    const int j = (i + 1) % segments;
    f.push_back({i, j, segments + j});
    f.push_back({i, segments + j, segments + i});
    f.push_back({cb, j, i});                          // bottom cap (normal -z)
    f.push_back({ct, segments + i, segments + j});    // top cap (normal +z)
  }
  return TriangleMesh(std::move(v), f);
}

TriangleMesh extrude_polygon(const std::vector<Vec2>& polygon_xz, double y_half) {
  if (polygon_xz.size() < 3) throw Error("extrude_polygon: need >= 3 vertices");
  // Expect CCW in the (x, z) plane (positive signed area).
  double area2 = 0.0;
  for (std::size_t i = 0; i < polygon_xz.size(); ++i) {
    const Vec2& a = polygon_xz[i];
    const Vec2& b = polygon_xz[(i + 1) % polygon_xz.size()];
    area2 += cross2(a, b);
  }
  if (area2 <= 0.0) throw Error("extrude_polygon: polygon must be CCW");

  const int n = static_cast<int>(polygon_xz.size());
  std::vector<Vec3> v;
  v.reserve(2 * n);
  for (const auto& p : polygon_xz) v.emplace_back(p.x(), -y_half, p.y());
  for (const auto& p : polygon_xz) v.emplace_back(p.x(), y_half, p.y());

  std::vector<TriangleMesh::Face> f;
  const auto cap = triangulate(polygon_xz);
  for (const auto& t : cap) {
    // A CCW (x, z) triangle at constant y has normal -y: correct for the
    // bottom cap, reversed for the top.
    f.push_back({t[0], t[1], t[2]});
    f.push_back({n + t[2], n + t[1], n + t[0]});
  }
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    f.push_back({i, n + i, n + j});
    f.push_back({i, n + j, j});
  }
  return TriangleMesh(std::move(v), f);
}

TriangleMesh make_lshape() {
  const std::vector<Vec2> poly = {
      {-0.010, -0.030}, {0.040, -0.030}, {0.040, -0.010},
      {0.010, -0.010},  {0.010, 0.030},  {-0.010, 0.030}};
  return extrude_polygon(poly, 0.010);
}

TriangleMesh make_wrench() {
  const std::vector<Vec2> poly = {
      {-0.008, -0.060}, {0.008, -0.060}, {0.008, 0.010},  {0.018, 0.015},
      {0.018, 0.030},   {0.006, 0.035},  {0.002, 0.020},  {-0.002, 0.020},
      {-0.006, 0.035},  {-0.018, 0.030}, {-0.018, 0.015}, {-0.008, 0.010}};
  return extrude_polygon(poly, 0.004);
}

TriangleMesh make_table(double sx, double sy, double thickness) {
  return make_box(sx, sy, thickness, Vec3(0, 0, -thickness / 2));
}

TriangleMesh make_object(const std::string& label) {
  if (label == "cube") return make_box(0.05, 0.05, 0.05);
  if (label == "cylinder") return make_cylinder(0.02, 0.06);
  if (label == "lshape") return make_lshape();
  if (label == "wrench") return make_wrench();
  throw ConfigError("unknown object label: " + label);
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file: " + path.string());
  char buf[128];
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& f : mesh.faces()) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

}  // namespace tacgraph
