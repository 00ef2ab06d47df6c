#include "oracles.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {
namespace {

// Texel-space coordinate with the documented 1/65536 texel rounding, ties to even.
double texel_coord(float uv, int resolution) {
  const double x = (static_cast<double>(uv) * resolution - 0.5) * 65536.0;
  double r = std::floor(x);
  if (x - r > 0.5 || (x - r == 0.5 && std::fmod(r, 2.0) != 0.0)) r += 1.0;
  return r / 65536.0;
}

double tent(double d) { return std::max(0.0, 1.0 - std::abs(d)); }

// Weight that lands on texel k along one axis once out-of-range taps are
// clamped onto the edge texels.
double clamped_tent(double x, int k, int resolution) {
  if (resolution == 1) return 1.0;
  if (k == 0) {
    double w = 0.0;
    for (int j = static_cast<int>(std::floor(x)) - 1; j <= 0; ++j) w += tent(x - j);
    return w;
  }
  if (k == resolution - 1) {
    double w = 0.0;
    for (int j = resolution - 1; j <= static_cast<int>(std::ceil(x)) + 1; ++j) w += tent(x - j);
    return w;
  }
  return tent(x - k);
}

}  // namespace

Accumulators naive_splat(const maketex::ImageF& image, const maketex::FragmentBuffer& frag,
                         const maketex::Mask& reject, int resolution) {
  const std::size_t texels = static_cast<std::size_t>(resolution) * resolution;
  Accumulators acc{std::vector<double>(texels * 3, 0.0), std::vector<double>(texels, 0.0)};
  for (int py = 0; py < frag.height; ++py) {
    for (int px = 0; px < frag.width; ++px) {
      const std::size_t i = static_cast<std::size_t>(py) * frag.width + px;
      if (frag.face_id[i] == maketex::kNoFace || reject[i] != 0) continue;
      const double x = texel_coord(frag.uv[i][0], resolution);
      const double y = texel_coord(frag.uv[i][1], resolution);
      for (int ty = 0; ty < resolution; ++ty) {
        const double wy = clamped_tent(y, ty, resolution);
        if (wy == 0.0) continue;
        for (int tx = 0; tx < resolution; ++tx) {
          const double w = clamped_tent(x, tx, resolution) * wy;
          if (w == 0.0) continue;
          const std::size_t t = static_cast<std::size_t>(ty) * resolution + tx;
          acc.weight[t] += w;
          for (int c = 0; c < 3; ++c) acc.color[3 * t + c] += w * image[3 * i + c];
        }
      }
    }
  }
  return acc;
}

RayHit cast_pixel(const maketex::TriMesh& mesh, const maketex::CameraPose& pose, int x, int y) {
  const double h = pose.ortho_half_extent;
  const double pitch = 2.0 * h / pose.image_size;
  const Eigen::Vector3d origin = pose.position() + pose.right() * (-h + (x + 0.5) * pitch) +
                                 pose.up() * (h - (y + 0.5) * pitch);
  const Eigen::Vector3d dir = pose.forward();
  RayHit best;
  best.depth = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& p0 = mesh.positions[mesh.faces[f][0]];
    const auto& p1 = mesh.positions[mesh.faces[f][1]];
    const auto& p2 = mesh.positions[mesh.faces[f][2]];
    const Eigen::Vector3d e1 = p1 - p0;
    const Eigen::Vector3d e2 = p2 - p0;
    const Eigen::Vector3d pv = dir.cross(e2);
    const double det = e1.dot(pv);
    if (std::abs(det) < 1e-15) continue;
    const Eigen::Vector3d tv = origin - p0;
    const double b1 = tv.dot(pv) / det;
    // Small slack so rays through a shared edge are not lost to rounding on
    // both sides of it.
    constexpr double slack = 1e-9;
    if (b1 < -slack || b1 > 1.0 + slack) continue;
    const Eigen::Vector3d qv = tv.cross(e1);
    const double b2 = dir.dot(qv) / det;
    if (b2 < -slack || b1 + b2 > 1.0 + slack) continue;
    const double t = e2.dot(qv) / det;
    if (t < best.depth) {
      const auto& uv = mesh.uv_corners[f];
      const Eigen::Vector2d tc = (1.0 - b1 - b2) * uv[0] + b1 * uv[1] + b2 * uv[2];
      best = {true, t, tc.x(), tc.y(), f};
    }
  }
  return best;
}

std::vector<double> nearest_neighbor_angles(const std::vector<maketex::CameraPose>& poses) {
  std::vector<double> out(poses.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    for (std::size_t j = 0; j < poses.size(); ++j) {
      if (i == j) continue;
      const double c = std::clamp(poses[i].direction().dot(poses[j].direction()), -1.0, 1.0);
      out[i] = std::min(out[i], std::acos(c));
    }
  }
  return out;
}

double sphere_rejected_fraction(double tau) {
  // Projected radius rho of the point with facing ratio n_z is sqrt(1 - n_z^2);
  // the kept disk has radius sqrt(1 - tau^2) inside the unit disk.
  const double kept = 1.0 - tau * tau;
  return 1.0 - kept;
}

std::vector<std::size_t> exhaustive_greedy(const maketex::TriMesh& mesh,
                                           const std::vector<maketex::CameraPose>& candidates, int texture_size,
                                           const maketex::FilterSettings& filter, std::size_t max_views,
                                           double min_gain_fraction) {
  const int r = texture_size;
  std::vector<double> weight(static_cast<std::size_t>(r) * r, 0.0);
  std::vector<bool> used(candidates.size(), false);
  std::vector<std::size_t> order;
  auto painted = [&](int tx, int ty) { return weight[static_cast<std::size_t>(ty) * r + tx] > 1e-3; };

  while (order.size() < max_views) {
    std::vector<long> scores(candidates.size(), -1);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      const auto frag = maketex::rasterize(mesh, candidates[c], true);
      long untextured = 0;
      for (std::size_t i = 0; i < frag.size(); ++i) {
        if (frag.face_id[i] == maketex::kNoFace) continue;
        const int tx = std::min(static_cast<int>(std::floor(frag.uv[i][0] * r)), r - 1);
        const int ty = std::min(static_cast<int>(std::floor(frag.uv[i][1] * r)), r - 1);
        if (!painted(tx, ty)) ++untextured;
      }
      scores[c] = untextured;
    }
    long best = -1;
    std::size_t best_index = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (scores[c] > best) {
        best = scores[c];
        best_index = c;
      }
    }
    const auto& pose = candidates[best_index];
    const double pixels = static_cast<double>(pose.image_size) * pose.image_size;
    if (best < 0 || static_cast<double>(best) < min_gain_fraction * pixels) break;
    used[best_index] = true;
    order.push_back(best_index);

    const auto view = maketex::render_view(mesh, pose);
    const auto masks = maketex::compute_reject_masks(view, filter);
    for (std::size_t i = 0; i < view.nocull.size(); ++i) {
      if (view.nocull.face_id[i] == maketex::kNoFace || masks.combined[i] != 0) continue;
      const double x = texel_coord(view.nocull.uv[i][0], r);
      const double y = texel_coord(view.nocull.uv[i][1], r);
      const int x0 = static_cast<int>(std::floor(x));
      const int y0 = static_cast<int>(std::floor(y));
      for (int ty = y0 - 1; ty <= y0 + 2; ++ty) {
        for (int tx = x0 - 1; tx <= x0 + 2; ++tx) {
          const double w = tent(x - tx) * tent(y - ty);
          if (w == 0.0) continue;
          const int cx = std::clamp(tx, 0, r - 1);
          const int cy = std::clamp(ty, 0, r - 1);
          weight[static_cast<std::size_t>(cy) * r + cx] += w;
        }
      }
    }
  }
  return order;
}

}  // namespace oracle
