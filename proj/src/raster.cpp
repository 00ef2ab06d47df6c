#include "maketex/raster.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "maketex/error.hpp"
#include "maketex/parallel.hpp"

namespace maketex {
namespace {

struct ScreenVertex {
  double x;  // pixel units, left to right
  double y;  // pixel units, top to bottom
  double depth;
};

bool lex_less(const ScreenVertex& a, const ScreenVertex& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

// Edge function evaluated with canonically ordered endpoints so that the two
// triangles sharing an edge compute bit-identical magnitudes.
struct Edge {
  double ox, oy, dx, dy, sign;

  Edge(const ScreenVertex& a, const ScreenVertex& b) {
    const bool swap = lex_less(b, a);
    const ScreenVertex& o = swap ? b : a;
    const ScreenVertex& e = swap ? a : b;
    ox = o.x;
    oy = o.y;
    dx = e.x - o.x;
    dy = e.y - o.y;
    sign = swap ? -1.0 : 1.0;
  }

  double operator()(double px, double py) const { return sign * (dx * (py - oy) - dy * (px - ox)); }

  // Narrows [lo, hi] to the pixel centers px = x + 0.5 where s * edge >= 0
  // on row py, padded by a pixel so the exact test still decides.
  void clip_row(double s, double py, int& lo, int& hi) const {
    const double slope = -s * sign * dy;
    const double at_zero = s * sign * (dx * (py - oy) + dy * ox);
    if (slope == 0.0) {
      if (at_zero < 0.0) hi = lo - 1;
      return;
    }
    const double root = -at_zero / slope - 0.5;
    if (slope > 0.0) {
      lo = std::max(lo, static_cast<int>(std::floor(root)) - 1);
    } else {
      hi = std::min(hi, static_cast<int>(std::ceil(root)) + 1);
    }
  }
};

double edge(const ScreenVertex& a, const ScreenVertex& b, double px, double py) { return Edge(a, b)(px, py); }

void check_same_size(const DepthMap& a, const DepthMap& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(Errc::ResolutionMismatch, "depth maps differ in resolution");
  }
}

}  // namespace

FragmentBuffer::FragmentBuffer(int w, int h, double near, double far)
    : width(w), height(h), near_plane(near), far_plane(far),
      face_id(static_cast<std::size_t>(w) * h, kNoFace),
      bary(static_cast<std::size_t>(w) * h, {0.F, 0.F, 0.F}),
      depth(static_cast<std::size_t>(w) * h, kBackground),
      uv(static_cast<std::size_t>(w) * h, {0.F, 0.F}) {}

std::size_t FragmentBuffer::foreground_count() const {
  return static_cast<std::size_t>(std::count_if(face_id.begin(), face_id.end(), [](auto f) { return f != kNoFace; }));
}

Mask FragmentBuffer::foreground_mask() const {
  Mask m(width, height);
  for (std::size_t i = 0; i < size(); ++i) m[i] = foreground(i) ? 1 : 0;
  return m;
}

FragmentBuffer rasterize(const TriMesh& mesh, const CameraPose& pose, bool cull_backfaces) {
  pose.validate();
  const int size = pose.image_size;
  FragmentBuffer frag(size, size, pose.near_plane(), pose.far_plane());

  const Eigen::Matrix4d view = view_matrix(pose);
  const double to_pixels = size / (2.0 * pose.ortho_half_extent);
  std::vector<ScreenVertex> screen(mesh.positions.size());
  for (std::size_t v = 0; v < mesh.positions.size(); ++v) {
    const Eigen::Vector4d p = view * mesh.positions[v].homogeneous();
    screen[v] = {(p.x() + pose.ortho_half_extent) * to_pixels, (pose.ortho_half_extent - p.y()) * to_pixels, -p.z()};
  }
  const Eigen::Vector3d toward_camera = pose.direction();

  parallel_for(0, size, [&](int row_lo, int row_hi) {
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
      if (cull_backfaces && mesh.face_normals[f].dot(toward_camera) <= 0.0) continue;
      const auto& face = mesh.faces[f];
      const ScreenVertex& a = screen[face[0]];
      const ScreenVertex& b = screen[face[1]];
      const ScreenVertex& c = screen[face[2]];

      const double min_x = std::min({a.x, b.x, c.x});
      const double max_x = std::max({a.x, b.x, c.x});
      const double min_y = std::min({a.y, b.y, c.y});
      const double max_y = std::max({a.y, b.y, c.y});
      const int x0 = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
      const int x1 = std::min(size - 1, static_cast<int>(std::floor(max_x - 0.5)));
      const int y0 = std::max(row_lo, static_cast<int>(std::ceil(min_y - 0.5)));
      const int y1 = std::min(row_hi - 1, static_cast<int>(std::floor(max_y - 0.5)));
      if (x0 > x1 || y0 > y1) continue;

      double area = edge(a, b, c.x, c.y);
      if (area == 0.0) continue;
      const double sign = area > 0.0 ? 1.0 : -1.0;
      area *= sign;
      const auto& uvs = mesh.uv_corners[f];
      const Edge e0(b, c);
      const Edge e1(c, a);
      const Edge e2(a, b);

      for (int y = y0; y <= y1; ++y) {
        const double py = y + 0.5;
        int lo = x0;
        int hi = x1;
        e0.clip_row(sign, py, lo, hi);
        e1.clip_row(sign, py, lo, hi);
        e2.clip_row(sign, py, lo, hi);
        for (int x = lo; x <= hi; ++x) {
          const double px = x + 0.5;
          const double w0 = sign * e0(px, py);
          const double w1 = sign * e1(px, py);
          const double w2 = sign * e2(px, py);
          if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
          const double b0 = w0 / area;
          const double b1 = w1 / area;
          const double b2 = 1.0 - b0 - b1;
          const auto depth = static_cast<float>(b0 * a.depth + b1 * b.depth + b2 * c.depth);
          const std::size_t i = static_cast<std::size_t>(y) * size + x;
          if (!(depth < frag.depth[i])) continue;
          frag.depth[i] = depth;
          frag.face_id[i] = static_cast<std::uint32_t>(f);
          frag.bary[i] = {static_cast<float>(b0), static_cast<float>(b1), static_cast<float>(std::max(0.0, b2))};
          const Eigen::Vector2d uv = b0 * uvs[0] + b1 * uvs[1] + b2 * uvs[2];
          frag.uv[i] = {static_cast<float>(std::clamp(uv.x(), 0.0, 1.0)),
                        static_cast<float>(std::clamp(uv.y(), 0.0, 1.0))};
        }
      }
    }
  });
  return frag;
}

ImageF DepthMap::normalized() const {
  ImageF out(width, height, 1, 0.F);
  const double range = far_plane - near_plane;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!valid(i)) continue;
    out[i] = static_cast<float>(std::clamp((far_plane - depth[i]) / range, 0.0, 1.0));
  }
  return out;
}

DepthMap render_depth(const FragmentBuffer& frag) {
  return DepthMap{frag.width, frag.height, frag.near_plane, frag.far_plane, frag.depth};
}

ImageF NormalMap::visualize() const {
  ImageF out(width, height, 3, 0.F);
  for (std::size_t i = 0; i < normal.size(); ++i) {
    if (valid[i] == 0) continue;
    for (int c = 0; c < 3; ++c) out[3 * i + c] = normal[i][c] * 0.5F + 0.5F;
  }
  return out;
}

NormalMap normals_from_depth(const DepthMap& depth, const CameraPose& pose) {
  const int w = depth.width;
  const int h = depth.height;
  NormalMap out{w, h, std::vector<std::array<float, 3>>(static_cast<std::size_t>(w) * h, {0.F, 0.F, 0.F}),
                std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0),
                std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0)};
  for (std::size_t i = 0; i < depth.depth.size(); ++i) out.foreground[i] = depth.valid(i) ? 1 : 0;
  // Pixel pitch follows the depth map's own resolution.
  const double pitch = 2.0 * pose.ortho_half_extent / w;
  auto ok = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < w && y < h && depth.valid(static_cast<std::size_t>(y) * w + x);
  };
  auto position = [&](int x, int y) {
    return Eigen::Vector3d((x + 0.5) * pitch, -(y + 0.5) * pitch, -depth.depth[static_cast<std::size_t>(y) * w + x]);
  };

  parallel_for(0, h, [&](int row_lo, int row_hi) {
    for (int y = row_lo; y < row_hi; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!ok(x, y)) continue;
        Eigen::Vector3d tx;
        if (ok(x - 1, y) && ok(x + 1, y)) tx = position(x + 1, y) - position(x - 1, y);
        else if (ok(x + 1, y)) tx = position(x + 1, y) - position(x, y);
        else if (ok(x - 1, y)) tx = position(x, y) - position(x - 1, y);
        else continue;
        // Rows grow downwards; ty points up the image.
        Eigen::Vector3d ty;
        if (ok(x, y - 1) && ok(x, y + 1)) ty = position(x, y - 1) - position(x, y + 1);
        else if (ok(x, y - 1)) ty = position(x, y - 1) - position(x, y);
        else if (ok(x, y + 1)) ty = position(x, y) - position(x, y + 1);
        else continue;
        Eigen::Vector3d n = tx.cross(ty);
        const double len = n.norm();
        if (!(len > 0.0)) continue;
        n /= len;
        if (n.z() < 0.0) n = -n;
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        out.normal[i] = {static_cast<float>(n.x()), static_cast<float>(n.y()), static_cast<float>(n.z())};
        out.valid[i] = 1;
      }
    }
  });
  return out;
}

Mask frontal_filter_mask(const NormalMap& normals, double tau_keep) {
  Mask reject(normals.width, normals.height);
  for (std::size_t i = 0; i < normals.normal.size(); ++i) {
    if (normals.foreground[i] == 0) continue;
    const double nz = normals.valid[i] != 0 ? normals.normal[i][2] : 0.0;
    if (nz < tau_keep) reject[i] = 1;
  }
  return reject;
}

Mask internal_face_mask(const DepthMap& depth_culled, const DepthMap& depth_nocull, double eps) {
  check_same_size(depth_culled, depth_nocull);
  Mask reject(depth_culled.width, depth_culled.height);
  const double tol = eps * (depth_culled.far_plane - depth_culled.near_plane);
  for (std::size_t i = 0; i < depth_culled.depth.size(); ++i) {
    const bool a = depth_culled.valid(i);
    const bool b = depth_nocull.valid(i);
    if (a != b) {
      reject[i] = 1;
    } else if (a && std::abs(static_cast<double>(depth_culled.depth[i]) - depth_nocull.depth[i]) > tol) {
      reject[i] = 1;
    }
  }
  return reject;
}

Mask render_texture_mask(const FragmentBuffer& frag, const TextureMask& tmask) {
  Mask out(frag.width, frag.height);
  const int r = tmask.resolution;
  for (std::size_t i = 0; i < frag.size(); ++i) {
    if (!frag.foreground(i)) continue;
    const int tx = std::min(static_cast<int>(frag.uv[i][0] * r), r - 1);
    const int ty = std::min(static_cast<int>(frag.uv[i][1] * r), r - 1);
    out[i] = tmask.at(tx, ty) ? 1 : 0;
  }
  return out;
}

ImageF render_rgb(const FragmentBuffer& frag, const UvTexture& tex) {
  ImageF out(frag.width, frag.height, 3, 0.F);
  const int r = tex.resolution;
  parallel_for(0, frag.height, [&](int row_lo, int row_hi) {
    for (std::size_t i = static_cast<std::size_t>(row_lo) * frag.width;
         i < static_cast<std::size_t>(row_hi) * frag.width; ++i) {
      if (!frag.foreground(i)) continue;
      const double x = frag.uv[i][0] * r - 0.5;
      const double y = frag.uv[i][1] * r - 0.5;
      const double fx0 = std::floor(x);
      const double fy0 = std::floor(y);
      const double fx = x - fx0;
      const double fy = y - fy0;
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);
      double acc[3] = {0.0, 0.0, 0.0};
      double wsum = 0.0;
      for (int k = 0; k < 4; ++k) {
        const int dx = k & 1;
        const int dy = k >> 1;
        const double w = (dx != 0 ? fx : 1.0 - fx) * (dy != 0 ? fy : 1.0 - fy);
        const int tx = std::clamp(x0 + dx, 0, r - 1);
        const int ty = std::clamp(y0 + dy, 0, r - 1);
        const std::size_t t = static_cast<std::size_t>(ty) * r + tx;
        if (w <= 0.0 || !tex.textured(t)) continue;
        const double inv = 1.0 / tex.weight_accum[t];
        for (int c = 0; c < 3; ++c) acc[c] += w * tex.color_accum[3 * t + c] * inv;
        wsum += w;
      }
      for (int c = 0; c < 3; ++c) {
        out[3 * i + c] = wsum > 0.0 ? static_cast<float>(std::clamp(acc[c] / wsum, 0.0, 1.0)) : kMidGray.r;
      }
    }
  });
  return out;
}

ViewRender render_view(const TriMesh& mesh, const CameraPose& pose) {
  ViewRender view;
  view.pose = pose;
  view.culled = rasterize(mesh, pose, true);
  view.nocull = rasterize(mesh, pose, false);
  view.depth_culled = render_depth(view.culled);
  view.depth_nocull = render_depth(view.nocull);
  return view;
}

RejectMasks compute_reject_masks(const ViewRender& view, const FilterSettings& settings) {
  const int w = view.nocull.width;
  const int h = view.nocull.height;
  RejectMasks masks{Mask(w, h), Mask(w, h), Mask(w, h), 0, 0};
  if (settings.frontal) {
    const NormalMap normals = normals_from_depth(view.depth_nocull, view.pose);
    masks.frontal = frontal_filter_mask(normals, settings.tau_keep);
  }
  if (settings.internal) masks.internal = internal_face_mask(view.depth_culled, view.depth_nocull, settings.depth_eps);
  for (std::size_t i = 0; i < view.nocull.size(); ++i) {
    if (!view.nocull.foreground(i)) {
      masks.frontal[i] = 0;
      masks.internal[i] = 0;
      continue;
    }
    masks.frontal_count += masks.frontal[i];
    masks.internal_count += masks.internal[i];
    masks.combined[i] = (masks.frontal[i] | masks.internal[i]) != 0 ? 1 : 0;
  }
  return masks;
}

}  // namespace maketex
