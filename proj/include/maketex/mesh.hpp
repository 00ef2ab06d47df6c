#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace maketex {

using Face = std::array<std::uint32_t, 3>;
using FaceUVs = std::array<Eigen::Vector2d, 3>;

// Indexed triangle mesh with per-corner UVs. Build through make_mesh so the
// invariants hold: indices in range, UVs in [0,1]^2, no zero-area faces and
// unit face normals.
struct TriMesh {
  std::vector<Eigen::Vector3d> positions;
  std::vector<Face> faces;
  std::vector<FaceUVs> uv_corners;
  std::vector<Eigen::Vector3d> face_normals;
  // Faces removed by make_mesh because their 3D area was below kDegenerateArea.
  std::size_t dropped_degenerate = 0;

  std::size_t num_faces() const { return faces.size(); }
  bool empty() const { return faces.empty(); }
};

inline constexpr double kDegenerateArea = 1e-12;

// Validates and finalizes raw mesh data. Throws EmptyMesh when no valid face
// survives, InvalidArgument on out-of-range indices or UVs.
TriMesh make_mesh(std::vector<Eigen::Vector3d> positions, std::vector<Face> faces, std::vector<FaceUVs> uv_corners);

// Wavefront OBJ reader. Polygons are fan-triangulated as (0, i, i+1); every
// face corner must reference a `vt` record.
TriMesh parse_obj(std::istream& in);
TriMesh load_mesh(const std::filesystem::path& path);

// Writes `v`/`vt`/`f` records. When a texture file name is given, a sibling
// .mtl file is written and referenced.
void save_obj(const TriMesh& mesh, const std::filesystem::path& path,
              const std::optional<std::string>& texture_file = std::nullopt);

struct MeshNormalization {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double scale = 1.0;

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return (p - center) * scale; }
};

// Centers the bounding box at the origin and scales the farthest vertex to
// distance 1.
std::pair<TriMesh, MeshNormalization> normalize(const TriMesh& mesh);

}  // namespace maketex
