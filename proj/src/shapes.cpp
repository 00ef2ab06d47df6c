#include "maketex/shapes.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <functional>
#include <numbers>

namespace maketex::shapes {
namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;

struct Builder {
  std::vector<Vector3d> positions;
  std::vector<Face> faces;
  std::vector<FaceUVs> uvs;

  std::uint32_t vertex(const Vector3d& p) {
    positions.push_back(p);
    return static_cast<std::uint32_t>(positions.size() - 1);
  }

  // Adds the triangle, flipping it when its normal disagrees with `outward`.
  void triangle(std::uint32_t a, std::uint32_t b, std::uint32_t c, const Vector2d& ta, const Vector2d& tb,
                const Vector2d& tc, const Vector3d& outward) {
    const Vector3d n = (positions[b] - positions[a]).cross(positions[c] - positions[a]);
    if (n.dot(outward) < 0.0) {
      faces.push_back({a, c, b});
      uvs.push_back({ta, tc, tb});
    } else {
      faces.push_back({a, b, c});
      uvs.push_back({ta, tb, tc});
    }
  }

  // Regular grid over (a, b) in [0,1]^2 with `na` x `nb` cells.
  void grid(int na, int nb, const std::function<Vector3d(double, double)>& position,
            const std::function<Vector2d(double, double)>& uv,
            const std::function<Vector3d(const Vector3d&)>& outward) {
    std::vector<std::uint32_t> ids;
    ids.reserve(static_cast<std::size_t>(na + 1) * (nb + 1));
    for (int j = 0; j <= nb; ++j) {
      for (int i = 0; i <= na; ++i) ids.push_back(vertex(position(double(i) / na, double(j) / nb)));
    }
    auto id = [&](int i, int j) { return ids[static_cast<std::size_t>(j) * (na + 1) + i]; };
    auto tc = [&](int i, int j) { return uv(double(i) / na, double(j) / nb); };
    for (int j = 0; j < nb; ++j) {
      for (int i = 0; i < na; ++i) {
        const Vector3d centre = 0.25 * (positions[id(i, j)] + positions[id(i + 1, j)] + positions[id(i, j + 1)] +
                                        positions[id(i + 1, j + 1)]);
        const Vector3d out = outward(centre);
        add_if_nondegenerate(id(i, j), id(i + 1, j), id(i + 1, j + 1), tc(i, j), tc(i + 1, j), tc(i + 1, j + 1), out);
        add_if_nondegenerate(id(i, j), id(i + 1, j + 1), id(i, j + 1), tc(i, j), tc(i + 1, j + 1), tc(i, j + 1), out);
      }
    }
  }

  void add_if_nondegenerate(std::uint32_t a, std::uint32_t b, std::uint32_t c, const Vector2d& ta,
                            const Vector2d& tb, const Vector2d& tc, const Vector3d& outward) {
    const Vector3d n = (positions[b] - positions[a]).cross(positions[c] - positions[a]);
    if (0.5 * n.norm() <= kDegenerateArea) return;
    triangle(a, b, c, ta, tb, tc, outward);
  }

  TriMesh build() { return make_mesh(std::move(positions), std::move(faces), std::move(uvs)); }
};

struct CubeSide {
  Vector3d normal;
  Vector3d s;
  Vector3d t;
};

// s x t == normal for every side.
const std::array<CubeSide, 6> kSides = {{
    {{1, 0, 0}, {0, 0, -1}, {0, 1, 0}},
    {{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}},
    {{0, 1, 0}, {1, 0, 0}, {0, 0, -1}},
    {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},
    {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},
    {{0, 0, -1}, {-1, 0, 0}, {0, 1, 0}},
}};

// Cell of side `k` in a 3x2 atlas, shrunk by `gutter` on every edge.
Vector2d atlas_uv(int k, double a, double b, double gutter) {
  const int col = k % 3;
  const int row = k / 3;
  const double w = 1.0 / 3.0;
  const double h = 0.5;
  return {col * w + gutter + a * (w - 2 * gutter), row * h + gutter + b * (h - 2 * gutter)};
}

}  // namespace

TriMesh quad(double half_size, double z) {
  Builder b;
  b.grid(
      1, 1, [&](double a, double c) { return Vector3d((2 * a - 1) * half_size, (2 * c - 1) * half_size, z); },
      [](double a, double c) { return Vector2d(a, c); }, [](const Vector3d&) { return Vector3d(0, 0, 1); });
  return b.build();
}

TriMesh cube(double half_size) {
  Builder b;
  for (int k = 0; k < 6; ++k) {
    const auto& side = kSides[k];
    b.grid(
        1, 1,
        [&](double a, double c) { return half_size * (side.normal + (2 * a - 1) * side.s + (2 * c - 1) * side.t); },
        [&](double a, double c) { return atlas_uv(k, a, c, 0.01); },
        [&](const Vector3d&) { return side.normal; });
  }
  return b.build();
}

TriMesh uv_sphere(int segments, int rings, double radius) {
  using std::numbers::pi;
  Builder b;
  b.grid(
      segments, rings,
      [&](double u, double v) {
        const double theta = pi * (1.0 - v);  // polar angle from +Y
        const double phi = 2 * pi * u;
        return Vector3d(radius * std::sin(theta) * std::sin(phi), radius * std::cos(theta),
                        radius * std::sin(theta) * std::cos(phi));
      },
      [](double u, double v) { return Vector2d(u, v); }, [](const Vector3d& c) { return c; });
  return b.build();
}

TriMesh cube_sphere(int subdivisions, double radius) {
  using std::numbers::pi;
  Builder b;
  for (int k = 0; k < 6; ++k) {
    const auto& side = kSides[k];
    b.grid(
        subdivisions, subdivisions,
        [&](double a, double c) {
          const double x = std::tan(pi / 4 * (2 * a - 1));
          const double y = std::tan(pi / 4 * (2 * c - 1));
          return Vector3d(radius * (side.normal + x * side.s + y * side.t).normalized());
        },
        [&](double a, double c) { return atlas_uv(k, a, c, 0.004); }, [](const Vector3d& c) { return c; });
  }
  return b.build();
}

TriMesh open_cylinder(int segments, int height_segments, double radius, double height) {
  using std::numbers::pi;
  Builder b;
  b.grid(
      segments, height_segments,
      [&](double u, double v) {
        const double phi = 2 * pi * u;
        return Vector3d(radius * std::sin(phi), height * (v - 0.5), radius * std::cos(phi));
      },
      [](double u, double v) { return Vector2d(u, v); },
      [](const Vector3d& c) { return Vector3d(c.x(), 0.0, c.z()); });
  return b.build();
}

TriMesh torus(int major_segments, int minor_segments, double major_radius, double minor_radius) {
  using std::numbers::pi;
  Builder b;
  b.grid(
      major_segments, minor_segments,
      [&](double u, double v) {
        const double phi = 2 * pi * u;
        const double psi = 2 * pi * v;
        const double ring = major_radius + minor_radius * std::cos(psi);
        return Vector3d(ring * std::sin(phi), minor_radius * std::sin(psi), ring * std::cos(phi));
      },
      [](double u, double v) { return Vector2d(u, v); },
      [&](const Vector3d& c) {
        const Vector3d axis_point = major_radius * Vector3d(c.x(), 0.0, c.z()).normalized();
        return Vector3d(c - axis_point);
      });
  return b.build();
}

}  // namespace maketex::shapes
