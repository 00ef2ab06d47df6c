#include "maketex/backproject.hpp"

#include <algorithm>
#include <cmath>

#include "maketex/error.hpp"

namespace maketex {
namespace {

constexpr double kSubTexel = static_cast<double>(1 << kSubTexelBits);

double snap(double x) { return std::nearbyint(x * kSubTexel) / kSubTexel; }

double uv_area(const FaceUVs& uv) {
  return 0.5 * std::abs((uv[1] - uv[0]).x() * (uv[2] - uv[0]).y() - (uv[1] - uv[0]).y() * (uv[2] - uv[0]).x());
}

// Strict overlap of a triangle with the open box centered at (cx, cy).
bool triangle_overlaps_box(const FaceUVs& tri, double cx, double cy, double half) {
  const double lo_x = cx - half;
  const double hi_x = cx + half;
  const double lo_y = cy - half;
  const double hi_y = cy + half;
  const double tmin_x = std::min({tri[0].x(), tri[1].x(), tri[2].x()});
  const double tmax_x = std::max({tri[0].x(), tri[1].x(), tri[2].x()});
  const double tmin_y = std::min({tri[0].y(), tri[1].y(), tri[2].y()});
  const double tmax_y = std::max({tri[0].y(), tri[1].y(), tri[2].y()});
  if (tmax_x <= lo_x || tmin_x >= hi_x || tmax_y <= lo_y || tmin_y >= hi_y) return false;
  for (int e = 0; e < 3; ++e) {
    const Eigen::Vector2d& a = tri[e];
    const Eigen::Vector2d& b = tri[(e + 1) % 3];
    const Eigen::Vector2d n(b.y() - a.y(), a.x() - b.x());
    double tmin = 1e300;
    double tmax = -1e300;
    for (const auto& p : tri) {
      const double d = n.dot(p);
      tmin = std::min(tmin, d);
      tmax = std::max(tmax, d);
    }
    const double c = n.x() * cx + n.y() * cy;
    const double r = half * (std::abs(n.x()) + std::abs(n.y()));
    if (tmax <= c - r || tmin >= c + r) return false;
  }
  return true;
}

}  // namespace

std::array<TexelTap, 4> bilinear_taps(float u, float v, int resolution) {
  const double x = snap(static_cast<double>(u) * resolution - 0.5);
  const double y = snap(static_cast<double>(v) * resolution - 0.5);
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const double fx = x - fx0;
  const double fy = y - fy0;
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const int r = resolution;
  auto texel = [r](int tx, int ty) {
    return static_cast<std::size_t>(std::clamp(ty, 0, r - 1)) * r + std::clamp(tx, 0, r - 1);
  };
  return {{{texel(x0, y0), (1.0 - fx) * (1.0 - fy)},
           {texel(x0 + 1, y0), fx * (1.0 - fy)},
           {texel(x0, y0 + 1), (1.0 - fx) * fy},
           {texel(x0 + 1, y0 + 1), fx * fy}}};
}

TextureMask splat(const ImageF& image, const FragmentBuffer& frag, const Mask& reject, UvTexture& tex) {
  if (image.width() != frag.width || image.height() != frag.height || reject.width() != frag.width ||
      reject.height() != frag.height) {
    throw Error(Errc::ResolutionMismatch, "splat inputs differ in resolution");
  }
  if (image.channels() != 3) throw Error(Errc::InvalidArgument, "splat expects an RGB image");
  const int r = tex.resolution;
  for (std::size_t i = 0; i < frag.size(); ++i) {
    if (!frag.foreground(i) || reject[i] != 0) continue;
    const double rgb[3] = {image[3 * i], image[3 * i + 1], image[3 * i + 2]};
    for (const auto& tap : bilinear_taps(frag.uv[i][0], frag.uv[i][1], r)) {
      if (tap.weight == 0.0) continue;
      tex.weight_accum[tap.texel] += tap.weight;
      for (int c = 0; c < 3; ++c) tex.color_accum[3 * tap.texel + c] += tap.weight * rgb[c];
    }
  }
  return tex.textured_mask();
}

TextureMask splat_footprint(const FragmentBuffer& frag, const Mask& selected, int resolution) {
  if (selected.width() != frag.width || selected.height() != frag.height) {
    throw Error(Errc::ResolutionMismatch, "footprint selection differs in resolution");
  }
  TextureMask out(resolution);
  for (std::size_t i = 0; i < frag.size(); ++i) {
    if (!frag.foreground(i) || selected[i] == 0) continue;
    for (const auto& tap : bilinear_taps(frag.uv[i][0], frag.uv[i][1], resolution)) {
      if (tap.weight > 0.0) out.bits[tap.texel] = 1;
    }
  }
  return out;
}

ImageF commit(const UvTexture& tex, Color fill) {
  const int r = tex.resolution;
  ImageF out(r, r, 3);
  const float fill_rgb[3] = {fill.r, fill.g, fill.b};
  for (std::size_t t = 0; t < tex.texel_count(); ++t) {
    for (int c = 0; c < 3; ++c) {
      out[3 * t + c] = tex.textured(t)
                           ? static_cast<float>(std::clamp(tex.color_accum[3 * t + c] / tex.weight_accum[t], 0.0, 1.0))
                           : fill_rgb[c];
    }
  }
  return out;
}

TextureMask chart_mask(const TriMesh& mesh, int resolution) {
  const int r = resolution;
  TextureMask chart(r);
  const double texel = 1.0 / r;
  for (const auto& tri : mesh.uv_corners) {
    if (uv_area(tri) <= kDegenerateUvArea) continue;
    const double lo_u = std::min({tri[0].x(), tri[1].x(), tri[2].x()});
    const double hi_u = std::max({tri[0].x(), tri[1].x(), tri[2].x()});
    const double lo_v = std::min({tri[0].y(), tri[1].y(), tri[2].y()});
    const double hi_v = std::max({tri[0].y(), tri[1].y(), tri[2].y()});
    const int x0 = std::max(0, static_cast<int>(std::floor(lo_u * r - 1.5)));
    const int x1 = std::min(r - 1, static_cast<int>(std::ceil(hi_u * r + 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(lo_v * r - 1.5)));
    const int y1 = std::min(r - 1, static_cast<int>(std::ceil(hi_v * r + 0.5)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        auto& bit = chart.bits[static_cast<std::size_t>(y) * r + x];
        if (bit != 0) continue;
        if (triangle_overlaps_box(tri, (x + 0.5) * texel, (y + 0.5) * texel, texel)) bit = 1;
      }
    }
  }
  return chart;
}

FillResult uv_fill(const ImageF& committed, const TextureMask& tmask, const TextureMask& chart, int max_rounds,
                   Color fill) {
  const int r = tmask.resolution;
  if (committed.width() != r || committed.height() != r || chart.resolution != r || committed.channels() != 3) {
    throw Error(Errc::ResolutionMismatch, "uv_fill inputs differ in resolution");
  }
  FillResult result{committed, tmask, 0};
  const float fill_rgb[3] = {fill.r, fill.g, fill.b};
  for (std::size_t t = 0; t < chart.bits.size(); ++t) {
    if (chart[t]) continue;
    result.textured.bits[t] = 0;
    for (int c = 0; c < 3; ++c) result.texture[3 * t + c] = fill_rgb[c];
  }

  std::vector<std::size_t> frontier;
  for (std::size_t t = 0; t < chart.bits.size(); ++t) {
    if (chart[t] && !result.textured[t]) frontier.push_back(t);
  }
  std::vector<std::pair<std::size_t, std::array<float, 3>>> updates;
  while (result.rounds < max_rounds && !frontier.empty()) {
    updates.clear();
    std::vector<std::size_t> remaining;
    for (const std::size_t t : frontier) {
      const int x = static_cast<int>(t % r);
      const int y = static_cast<int>(t / r);
      double acc[3] = {0.0, 0.0, 0.0};
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= r || ny >= r) continue;
          const std::size_t nt = static_cast<std::size_t>(ny) * r + nx;
          if (!result.textured[nt]) continue;
          for (int c = 0; c < 3; ++c) acc[c] += result.texture[3 * nt + c];
          ++n;
        }
      }
      if (n == 0) {
        remaining.push_back(t);
        continue;
      }
      updates.push_back({t, {static_cast<float>(acc[0] / n), static_cast<float>(acc[1] / n),
                             static_cast<float>(acc[2] / n)}});
    }
    if (updates.empty()) break;
    for (const auto& [t, rgb] : updates) {
      result.textured.bits[t] = 1;
      for (int c = 0; c < 3; ++c) result.texture[3 * t + c] = rgb[c];
    }
    frontier.swap(remaining);
    ++result.rounds;
  }
  return result;
}

double uv_coverage(const TextureMask& tmask, const TextureMask& chart) {
  if (tmask.resolution != chart.resolution) throw Error(Errc::ResolutionMismatch, "coverage masks differ in resolution");
  std::size_t in_chart = 0;
  std::size_t painted = 0;
  for (std::size_t t = 0; t < chart.bits.size(); ++t) {
    if (!chart[t]) continue;
    ++in_chart;
    if (tmask[t]) ++painted;
  }
  return in_chart == 0 ? 0.0 : static_cast<double>(painted) / static_cast<double>(in_chart);
}

Mask degenerate_uv_mask(const FragmentBuffer& frag, const TriMesh& mesh) {
  std::vector<std::uint8_t> flat(mesh.num_faces(), 0);
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) flat[f] = uv_area(mesh.uv_corners[f]) <= kDegenerateUvArea ? 1 : 0;
  Mask out(frag.width, frag.height);
  for (std::size_t i = 0; i < frag.size(); ++i) {
    if (frag.foreground(i) && frag.face_id[i] < flat.size()) out[i] = flat[frag.face_id[i]];
  }
  return out;
}

}  // namespace maketex

namespace maketex {

Mask backprojection_reject(const TriMesh& mesh, const ViewRender& view, const RejectMasks& masks) {
  Mask reject = masks.combined;
  const Mask flat = degenerate_uv_mask(view.nocull, mesh);
  for (std::size_t i = 0; i < reject.values().size(); ++i) reject[i] = (reject[i] | flat[i]) != 0 ? 1 : 0;
  return reject;
}

}  // namespace maketex
