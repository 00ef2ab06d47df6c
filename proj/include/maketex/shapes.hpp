#pragma once

#include "maketex/mesh.hpp"

// Procedural UV-mapped meshes used as fixtures by tests, benchmarks and the
// Python bindings. All faces are wound counter-clockwise seen from outside.
namespace maketex::shapes {

// Axis-aligned quad in the z = `z` plane facing +Z, UV = [0,1]^2.
TriMesh quad(double half_size = 1.0, double z = 0.0);

// Cube with corners at +-half_size, 12 triangles, each side mapped to its own
// cell of a 3x2 atlas.
TriMesh cube(double half_size = 1.0);

// Latitude/longitude sphere: u follows azimuth, v runs from the south pole
// (v = 0) to the north pole (v = 1).
TriMesh uv_sphere(int segments = 64, int rings = 32, double radius = 1.0);

// Cube subdivided into n x n quads per side and projected onto the sphere with
// an equal-angle mapping; each side owns one cell of a 3x2 atlas. Texel
// density varies by less than 2x across the surface.
TriMesh cube_sphere(int subdivisions = 16, double radius = 1.0);

// Single-sided tube around the Y axis without caps; both openings expose the
// inner wall.
TriMesh open_cylinder(int segments = 64, int height_segments = 8, double radius = 0.5, double height = 1.6);

// Torus around the Y axis.
TriMesh torus(int major_segments = 48, int minor_segments = 24, double major_radius = 1.0,
              double minor_radius = 0.4);

}  // namespace maketex::shapes
