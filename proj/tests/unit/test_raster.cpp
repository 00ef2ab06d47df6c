#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "maketex/camera.hpp"
#include "maketex/error.hpp"
#include "maketex/raster.hpp"
#include "maketex/shapes.hpp"
#include "oracles.hpp"

using namespace maketex;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

CameraPose front_pose(int size) {
  CameraPose p;
  p.image_size = size;
  return p;
}

TriMesh triangle(double z, bool reversed) {
  std::vector<Vector3d> p{{-0.8, -0.6, z}, {0.8, -0.6, z}, {0.0, 0.8, z}};
  std::vector<Face> f{reversed ? Face{0, 2, 1} : Face{0, 1, 2}};
  FaceUVs uv{Vector2d(0, 0), Vector2d(1, 0), Vector2d(0.5, 1)};
  if (reversed) std::swap(uv[1], uv[2]);
  return make_mesh(p, f, {uv});
}

// Fragment buffer with a single pixel at the given UV.
FragmentBuffer one_pixel(float u, float v) {
  FragmentBuffer frag(1, 1, 1.0, 3.0);
  frag.face_id[0] = 0;
  frag.depth[0] = 2.0F;
  frag.bary[0] = {1.F, 0.F, 0.F};
  frag.uv[0] = {u, v};
  return frag;
}

TriMesh tilted_plane(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  std::vector<Vector3d> p;
  for (auto [x, y] : {std::pair{-0.6, -0.6}, {0.6, -0.6}, {0.6, 0.6}, {-0.6, 0.6}}) p.emplace_back(c * x, y, -s * x);
  std::vector<FaceUVs> uv{{Vector2d(0, 0), Vector2d(1, 0), Vector2d(1, 1)}, {Vector2d(0, 0), Vector2d(1, 1), Vector2d(0, 1)}};
  return make_mesh(p, {Face{0, 1, 2}, Face{0, 2, 3}}, uv);
}

}  // namespace

TEST_CASE("front-facing triangle covers the center pixel") {
  const auto frag = rasterize(triangle(0.0, false), front_pose(64), true);
  const std::size_t c = 32 * 64 + 32;
  CHECK(frag.face_id[c] == 0);
  for (float b : frag.bary[c]) CHECK(b >= 0.F);
  CHECK(frag.depth[c] == doctest::Approx(2.0));
}

TEST_CASE("reversed winding is culled") {
  const auto culled = rasterize(triangle(0.0, true), front_pose(64), true);
  CHECK(culled.foreground_count() == 0);
  const auto kept = rasterize(triangle(0.0, true), front_pose(64), false);
  CHECK(kept.foreground_count() > 0);
}

TEST_CASE("nearer of two stacked triangles wins") {
  const TriMesh a = triangle(0.0, false);
  const TriMesh b = triangle(0.5, false);
  std::vector<Vector3d> p = a.positions;
  p.insert(p.end(), b.positions.begin(), b.positions.end());
  // Far triangle gets the higher id so the tie rule cannot explain the result.
  const TriMesh both = make_mesh(p, {Face{0, 1, 2}, Face{3, 4, 5}}, {a.uv_corners[0], b.uv_corners[0]});
  const auto frag = rasterize(both, front_pose(64), true);
  for (std::size_t i = 0; i < frag.size(); ++i) {
    if (frag.foreground(i)) CHECK(frag.face_id[i] == 1);
  }
}

TEST_CASE("equal depths resolve to the lower face id") {
  const TriMesh a = triangle(0.0, false);
  std::vector<Vector3d> p = a.positions;
  p.insert(p.end(), a.positions.begin(), a.positions.end());
  const TriMesh twice = make_mesh(p, {Face{3, 4, 5}, Face{0, 1, 2}}, {a.uv_corners[0], a.uv_corners[0]});
  const auto frag = rasterize(twice, front_pose(64), true);
  for (std::size_t i = 0; i < frag.size(); ++i) {
    if (frag.foreground(i)) CHECK(frag.face_id[i] == 0);
  }
}

TEST_CASE("empty scene is all background") {
  std::vector<Vector3d> p{{5, 0, 0}, {6, 0, 0}, {5, 1, 0}};
  const TriMesh away = make_mesh(p, {Face{0, 1, 2}}, {FaceUVs{Vector2d(0, 0), Vector2d(1, 0), Vector2d(0, 1)}});
  CameraPose pose = front_pose(32);
  pose.ortho_half_extent = 1.0;
  const auto frag = rasterize(away, pose, false);
  CHECK(frag.foreground_count() == 0);
  const DepthMap d = render_depth(frag);
  for (float z : d.depth) CHECK(z == kBackground);
  const Mask m = internal_face_mask(d, d, 1e-3);
  CHECK(count_set(m) == 0);
}

TEST_CASE("fragment buffer invariants") {
  const TriMesh sphere = shapes::cube_sphere(8);
  for (const auto& pose : fibonacci_lattice(5, 2.0, 1.1, 96)) {
    for (bool cull : {true, false}) {
      const auto frag = rasterize(sphere, pose, cull);
      for (std::size_t i = 0; i < frag.size(); ++i) {
        CHECK((frag.face_id[i] == kNoFace) == (frag.depth[i] == kBackground));
        if (!frag.foreground(i)) continue;
        const auto& b = frag.bary[i];
        CHECK(std::abs(b[0] + b[1] + b[2] - 1.0) < 1e-6);
        CHECK(frag.uv[i][0] >= 0.F);
        CHECK(frag.uv[i][0] <= 1.F);
        CHECK(frag.uv[i][1] >= 0.F);
        CHECK(frag.uv[i][1] <= 1.F);
        CHECK(frag.depth[i] >= frag.near_plane);
        CHECK(frag.depth[i] <= frag.far_plane);
      }
    }
  }
}

TEST_CASE("UVs match a brute-force ray cast on a two-triangle quad") {
  const TriMesh quad = shapes::quad(0.9, 0.1);
  const CameraPose pose = front_pose(64);
  const auto frag = rasterize(quad, pose, true);
  int hits = 0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const auto hit = oracle::cast_pixel(quad, pose, x, y);
      const std::size_t i = static_cast<std::size_t>(y) * 64 + x;
      REQUIRE(hit.hit == frag.foreground(i));
      if (!hit.hit) continue;
      ++hits;
      CHECK(std::abs(frag.uv[i][0] - hit.u) < 1e-5);
      CHECK(std::abs(frag.uv[i][1] - hit.v) < 1e-5);
      CHECK(std::abs(frag.depth[i] - hit.depth) < 1e-5);
    }
  }
  CHECK(hits > 0);
}

TEST_CASE("closed sphere rasterizes without cracks") {
  const TriMesh sphere = shapes::cube_sphere(6);
  const CameraPose pose = fibonacci_lattice(7, 2.0, 1.1, 80)[3];
  const auto frag = rasterize(sphere, pose, true);
  int mismatches = 0;
  for (int y = 0; y < 80; ++y) {
    for (int x = 0; x < 80; ++x) {
      const auto hit = oracle::cast_pixel(sphere, pose, x, y);
      if (hit.hit != frag.foreground(static_cast<std::size_t>(y) * 80 + x)) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("sphere depth range and normalized brightness") {
  const CameraPose pose = front_pose(256);
  const auto frag = rasterize(shapes::uv_sphere(), pose, true);
  const DepthMap d = render_depth(frag);
  float lo = std::numeric_limits<float>::infinity();
  float hi = 0.F;
  for (std::size_t i = 0; i < d.depth.size(); ++i) {
    if (!d.valid(i)) continue;
    lo = std::min(lo, d.depth[i]);
    hi = std::max(hi, d.depth[i]);
  }
  CHECK(std::abs(lo - 1.0) < 2 * pose.pixel_size());
  CHECK(hi <= 3.0);
  const ImageF n = d.normalized();
  float brightest = 0.F;
  for (float v : n.values()) brightest = std::max(brightest, v);
  CHECK(n.at(128, 128) >= brightest - 1e-3F);
  CHECK(n.at(0, 0) == 0.F);
}

TEST_CASE("texture mask renders") {
  const TriMesh sphere = shapes::cube_sphere(8);
  const CameraPose pose = front_pose(96);
  const auto frag = rasterize(sphere, pose, true);
  const int r = 64;
  CHECK(count_set(render_texture_mask(frag, TextureMask(r, false))) == 0);
  const Mask full = render_texture_mask(frag, TextureMask(r, true));
  CHECK(full == frag.foreground_mask());

  TextureMask left(r);
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r / 2; ++x) left.bits[static_cast<std::size_t>(y) * r + x] = 1;
  }
  const Mask m = render_texture_mask(frag, left);
  int checked = 0;
  for (int y = 0; y < 96; ++y) {
    for (int x = 0; x < 96; ++x) {
      const auto hit = oracle::cast_pixel(sphere, pose, x, y);
      if (!hit.hit) {
        CHECK(m.at(x, y) == 0);
        continue;
      }
      // Skip pixels sitting on the texel boundary where float rounding decides,
      // and pixels on an edge between two UV charts, where either face is right.
      if (std::abs(hit.u * r - r / 2) < 1e-3) continue;
      if (hit.face != frag.face_id[static_cast<std::size_t>(y) * 96 + x]) continue;
      CHECK((m.at(x, y) != 0) == (hit.u * r < r / 2));
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("render_rgb conventions") {
  const TriMesh sphere = shapes::cube_sphere(8);
  const auto frag = rasterize(sphere, front_pose(96), true);
  const int r = 32;

  UvTexture red(r);
  for (std::size_t t = 0; t < red.texel_count(); ++t) {
    red.weight_accum[t] = 2.0;
    red.color_accum[3 * t] = 2.0;
  }
  const ImageF rgb = render_rgb(frag, red);
  for (std::size_t i = 0; i < frag.size(); ++i) {
    if (frag.foreground(i)) {
      CHECK(std::abs(rgb[3 * i] - 1.0) <= 1.0 / 255);
      CHECK(std::abs(rgb[3 * i + 1]) <= 1.0 / 255);
    } else {
      CHECK(rgb[3 * i] == 0.F);
    }
  }

  const ImageF gray = render_rgb(frag, UvTexture(r));
  for (std::size_t i = 0; i < frag.size(); ++i) {
    if (frag.foreground(i)) CHECK(gray[3 * i + 2] == doctest::Approx(0.5));
  }

  ImageF checker(2, 2, 3);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) {
      const float v = (x + y) % 2 == 0 ? 1.F : 0.F;
      checker.at(x, y, 0) = v;
      checker.at(x, y, 1) = 1.F - v;
      checker.at(x, y, 2) = 0.25F;
    }
  }
  const UvTexture tex = UvTexture::from_image(checker);
  for (auto [tx, ty] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
    const ImageF px = render_rgb(one_pixel(0.25F + 0.5F * tx, 0.25F + 0.5F * ty), tex);
    for (int c = 0; c < 3; ++c) CHECK(px[c] == checker.at(tx, ty, c));
  }
}

TEST_CASE("normals from depth") {
  const CameraPose pose = front_pose(128);
  SUBCASE("fronto-parallel plane") {
    const auto frag = rasterize(shapes::quad(0.8, 0.2), pose, true);
    const NormalMap n = normals_from_depth(render_depth(frag), pose);
    for (std::size_t i = 0; i < frag.size(); ++i) {
      if (!n.valid[i]) continue;
      CHECK(std::abs(n.normal[i][2] - 1.0) < 1e-3);
    }
    CHECK(count_set(frontal_filter_mask(n, 0.3)) == 0);
  }
  SUBCASE("plane tilted by 45 degrees") {
    const auto frag = rasterize(tilted_plane(std::numbers::pi / 4), pose, true);
    const NormalMap n = normals_from_depth(render_depth(frag), pose);
    int interior = 0;
    for (int y = 2; y < 126; ++y) {
      for (int x = 2; x < 126; ++x) {
        bool inside = true;
        for (int d = -2; d <= 2; ++d) {
          inside = inside && frag.foreground(static_cast<std::size_t>(y + d) * 128 + x) &&
                   frag.foreground(static_cast<std::size_t>(y) * 128 + x + d);
        }
        if (!inside) continue;
        const std::size_t i = static_cast<std::size_t>(y) * 128 + x;
        REQUIRE(n.valid[i]);
        CHECK(std::abs(n.normal[i][2] - std::sqrt(0.5)) < 0.01);
        const auto& v = n.normal[i];
        CHECK(std::abs(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) - 1.0) < 1e-4);
        ++interior;
      }
    }
    CHECK(interior > 1000);
  }
  SUBCASE("sphere center faces the camera") {
    const auto frag = rasterize(shapes::uv_sphere(), pose, true);
    const NormalMap n = normals_from_depth(render_depth(frag), pose);
    const std::size_t c = 64 * 128 + 64;
    REQUIRE(n.valid[c]);
    CHECK(std::abs(n.normal[c][2] - 1.0) < 0.01);
  }
}

TEST_CASE("frontal filter on the sphere") {
  const CameraPose pose = front_pose(512);
  const auto frag = rasterize(shapes::uv_sphere(), pose, true);
  const NormalMap n = normals_from_depth(render_depth(frag), pose);
  const double fg = static_cast<double>(frag.foreground_count());
  const Mask r0 = frontal_filter_mask(n, 0.0);
  const Mask r1 = frontal_filter_mask(n, 0.1);
  const Mask r3 = frontal_filter_mask(n, 0.3);
  const Mask r6 = frontal_filter_mask(n, 0.6);
  CHECK(count_set(r0) == 0);
  CHECK(std::abs(count_set(r3) / fg - oracle::sphere_rejected_fraction(0.3)) < 0.02);
  for (std::size_t i = 0; i < r1.pixel_count(); ++i) {
    if (r1[i]) CHECK(r3[i]);
    if (r3[i]) CHECK(r6[i]);
  }
}

TEST_CASE("internal face mask") {
  SUBCASE("cube is empty for a 16-view lattice") {
    const TriMesh cube = normalize(shapes::cube()).first;
    for (const auto& pose : fibonacci_lattice(16, 2.0, 1.1, 128)) {
      const ViewRender v = render_view(cube, pose);
      CHECK(count_set(internal_face_mask(v.depth_culled, v.depth_nocull, 1e-3)) == 0);
    }
  }
  SUBCASE("open cylinder marks exactly the visible inner wall") {
    const TriMesh cyl = normalize(shapes::open_cylinder()).first;
    CameraPose pose;
    pose.elevation = 0.6;
    pose.azimuth = 0.4;
    pose.image_size = 256;
    const ViewRender v = render_view(cyl, pose);
    const Mask m = internal_face_mask(v.depth_culled, v.depth_nocull, 1e-3);
    const Vector3d toward = pose.direction();
    std::size_t inner = 0;
    std::size_t mismatched = 0;
    for (std::size_t i = 0; i < m.pixel_count(); ++i) {
      const bool back_facing = v.nocull.foreground(i) && cyl.face_normals[v.nocull.face_id[i]].dot(toward) <= 0.0;
      inner += back_facing ? 1 : 0;
      if ((m[i] != 0) != back_facing) ++mismatched;
    }
    CHECK(inner > 1000);
    CHECK(mismatched == 0);
  }
  SUBCASE("depth monotonicity under culling") {
    const TriMesh cyl = normalize(shapes::open_cylinder()).first;
    for (const auto& pose : fibonacci_lattice(8, 2.0, 1.1, 96)) {
      const ViewRender v = render_view(cyl, pose);
      for (std::size_t i = 0; i < v.nocull.size(); ++i) {
        if (v.depth_culled.valid(i) && v.depth_nocull.valid(i)) {
          CHECK(v.depth_nocull.depth[i] <= v.depth_culled.depth[i] + 1e-9);
        }
      }
    }
  }
  SUBCASE("resolution mismatch") {
    const TriMesh cube = shapes::cube(0.5);
    const DepthMap a = render_depth(rasterize(cube, front_pose(32), true));
    const DepthMap b = render_depth(rasterize(cube, front_pose(16), true));
    try {
      internal_face_mask(a, b, 1e-3);
      FAIL("expected ResolutionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ResolutionMismatch);
    }
  }
}

TEST_CASE("reject masks respect the settings switches") {
  const TriMesh cyl = normalize(shapes::open_cylinder()).first;
  CameraPose pose;
  pose.elevation = 0.6;
  pose.image_size = 128;
  const ViewRender v = render_view(cyl, pose);
  FilterSettings off;
  off.frontal = false;
  off.internal = false;
  const RejectMasks none = compute_reject_masks(v, off);
  CHECK(count_set(none.combined) == 0);
  const RejectMasks all = compute_reject_masks(v, FilterSettings{});
  CHECK(all.internal_count > 0);
  CHECK(all.frontal_count > 0);
  for (std::size_t i = 0; i < all.combined.pixel_count(); ++i) {
    CHECK((all.combined[i] != 0) == (all.frontal[i] != 0 || all.internal[i] != 0));
  }
}
