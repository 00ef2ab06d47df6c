#include "maketex/mesh.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "maketex/error.hpp"

namespace maketex {
namespace {

constexpr double kUvSlack = 1e-6;

double parse_double(std::string_view token, std::size_t line) {
  // std::from_chars for double is unavailable on older libstdc++.
  std::string s(token);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

long parse_index(std::string_view token, std::size_t count, std::size_t line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size() || v == 0) {
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": bad index '" + std::string(token) + "'");
  }
  const long resolved = v > 0 ? v - 1 : static_cast<long>(count) + v;
  if (resolved < 0 || resolved >= static_cast<long>(count)) {
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": index out of range '" +
                                      std::string(token) + "'");
  }
  return resolved;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

TriMesh make_mesh(std::vector<Eigen::Vector3d> positions, std::vector<Face> faces, std::vector<FaceUVs> uv_corners) {
  if (faces.size() != uv_corners.size()) {
    throw Error(Errc::InvalidArgument, "faces and uv_corners differ in length");
  }
  TriMesh mesh;
  mesh.positions = std::move(positions);
  mesh.faces.reserve(faces.size());
  mesh.uv_corners.reserve(faces.size());
  mesh.face_normals.reserve(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& face = faces[f];
    for (auto idx : face) {
      if (idx >= mesh.positions.size()) {
        throw Error(Errc::InvalidArgument, "face " + std::to_string(f) + " references missing vertex");
      }
    }
    FaceUVs uvs = uv_corners[f];
    for (auto& uv : uvs) {
      for (int k = 0; k < 2; ++k) {
        if (!(uv[k] >= -kUvSlack && uv[k] <= 1.0 + kUvSlack)) {
          throw Error(Errc::InvalidArgument, "face " + std::to_string(f) + " has uv outside [0,1]");
        }
        uv[k] = std::clamp(uv[k], 0.0, 1.0);
      }
    }
    const Eigen::Vector3d n = (mesh.positions[face[1]] - mesh.positions[face[0]])
                                  .cross(mesh.positions[face[2]] - mesh.positions[face[0]]);
    if (0.5 * n.norm() <= kDegenerateArea) {
      ++mesh.dropped_degenerate;
      continue;
    }
    mesh.faces.push_back(face);
    mesh.uv_corners.push_back(uvs);
    mesh.face_normals.push_back(n.normalized());
  }
  if (mesh.faces.empty()) throw Error(Errc::EmptyMesh, "mesh has no non-degenerate faces");
  return mesh;
}

TriMesh parse_obj(std::istream& in) {
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Vector2d> texcoords;
  std::vector<Face> faces;
  std::vector<FaceUVs> uvs;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const auto kind = tok[0];
    if (kind == "v") {
      if (tok.size() < 4) throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": v needs 3 coordinates");
      positions.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                             parse_double(tok[3], line_no));
    } else if (kind == "vt") {
      if (tok.size() < 3) throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": vt needs 2 coordinates");
      texcoords.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no));
    } else if (kind == "f") {
      if (tok.size() < 4) throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": f needs 3 corners");
      std::vector<std::pair<std::uint32_t, std::uint32_t>> corners;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        const auto corner = tok[i];
        const auto slash = corner.find('/');
        if (slash == std::string_view::npos) {
          throw Error(Errc::MissingUVs, "line " + std::to_string(line_no) + ": face corner without vt index");
        }
        const auto rest = corner.substr(slash + 1);
        const auto vt_token = rest.substr(0, rest.find('/'));
        if (vt_token.empty()) {
          throw Error(Errc::MissingUVs, "line " + std::to_string(line_no) + ": face corner without vt index");
        }
        const auto v = parse_index(corner.substr(0, slash), positions.size(), line_no);
        const auto vt = parse_index(vt_token, texcoords.size(), line_no);
        corners.emplace_back(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(vt));
      }
      for (std::size_t i = 1; i + 1 < corners.size(); ++i) {
        faces.push_back({corners[0].first, corners[i].first, corners[i + 1].first});
        uvs.push_back({texcoords[corners[0].second], texcoords[corners[i].second], texcoords[corners[i + 1].second]});
      }
    }
    // Other records (vn, g, o, s, usemtl, mtllib, ...) carry nothing we use.
  }
  if (faces.empty()) throw Error(Errc::EmptyMesh, "OBJ contains no faces");
  try {
    return make_mesh(std::move(positions), std::move(faces), std::move(uvs));
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidArgument) throw Error(Errc::ParseError, e.message());
    throw;
  }
}

TriMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return parse_obj(in);
}

void save_obj(const TriMesh& mesh, const std::filesystem::path& path, const std::optional<std::string>& texture_file) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  out.precision(9);
  if (texture_file) {
    auto mtl_path = path;
    mtl_path.replace_extension(".mtl");
    std::ofstream mtl(mtl_path);
    if (!mtl) throw Error(Errc::Io, "cannot open " + mtl_path.string() + " for writing");
    mtl << "newmtl baked\nKa 1 1 1\nKd 1 1 1\nKs 0 0 0\nillum 1\nmap_Kd " << *texture_file << "\n";
    out << "mtllib " << mtl_path.filename().string() << "\nusemtl baked\n";
  }
  for (const auto& p : mesh.positions) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const auto& face_uvs : mesh.uv_corners) {
    for (const auto& uv : face_uvs) out << "vt " << uv.x() << ' ' << uv.y() << '\n';
  }
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    out << 'f';
    for (int k = 0; k < 3; ++k) out << ' ' << mesh.faces[f][k] + 1 << '/' << 3 * f + k + 1;
    out << '\n';
  }
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

std::pair<TriMesh, MeshNormalization> normalize(const TriMesh& mesh) {
  if (mesh.empty() || mesh.positions.empty()) throw Error(Errc::EmptyMesh, "cannot normalize an empty mesh");
  Eigen::Vector3d lo = mesh.positions.front();
  Eigen::Vector3d hi = lo;
  for (const auto& p : mesh.positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  MeshNormalization norm;
  norm.center = 0.5 * (lo + hi);
  double radius = 0.0;
  for (const auto& p : mesh.positions) radius = std::max(radius, (p - norm.center).norm());
  if (!(radius > 0.0)) throw Error(Errc::EmptyMesh, "mesh has zero extent");
  norm.scale = 1.0 / radius;

  TriMesh out = mesh;
  for (auto& p : out.positions) p = norm.apply(p);
  return {std::move(out), norm};
}

}  // namespace maketex
