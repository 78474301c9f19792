#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <vector>

#include "tacgraph/mesh.hpp"

namespace tacgraph {

// Procedural watertight meshes used for tests and benchmark assets.
// Units are meters; all shapes are centered as documented.

TriangleMesh make_box(double sx, double sy, double sz,
                      const Vec3& center = Vec3::Zero());

// Unit cube centered at the origin.
TriangleMesh make_unit_cube();

// Regular tetrahedron centered at the origin, circumradius scale*sqrt(3).
TriangleMesh make_tetrahedron(double scale = 0.5);

// Axis along z, centered at the origin.
TriangleMesh make_cylinder(double radius, double height, int segments = 48);

// A CCW simple polygon in the (x, z) plane extruded along y in [-y_half, y_half].
TriangleMesh extrude_polygon(const std::vector<Eigen::Vector2d>& polygon_xz,
                             double y_half);

// Vertical 20x20x60 mm arm with a foot extending to +x; grasp-symmetric
// across its +-y faces.
TriangleMesh make_lshape();

// Flat open-end wrench silhouette, 8 mm thick; non-convex (V-notch jaw).
TriangleMesh make_wrench();

// Table slab whose top surface is the z = 0 plane.
TriangleMesh make_table(double sx = 0.5, double sy = 0.5, double thickness = 0.04);

// Returns the benchmark object for a label in {cube, cylinder, lshape, wrench}.
TriangleMesh make_object(const std::string& label);

// Plain v/f OBJ output with deterministic formatting.
void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace tacgraph
