#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "maketex/camera.hpp"
#include "maketex/image.hpp"
#include "maketex/mesh.hpp"
#include "maketex/texture.hpp"

namespace maketex {

inline constexpr std::uint32_t kNoFace = std::numeric_limits<std::uint32_t>::max();
inline constexpr float kBackground = std::numeric_limits<float>::infinity();

// Per-pixel rasterization result. Row 0 is the top of the image. Pixels
// without a face hold kNoFace and depth kBackground.
struct FragmentBuffer {
  int width = 0;
  int height = 0;
  double near_plane = 0.0;
  double far_plane = 1.0;
  std::vector<std::uint32_t> face_id;
  std::vector<std::array<float, 3>> bary;
  std::vector<float> depth;
  std::vector<std::array<float, 2>> uv;

  FragmentBuffer() = default;
  FragmentBuffer(int w, int h, double near, double far);

  std::size_t size() const { return face_id.size(); }
  bool foreground(std::size_t i) const { return face_id[i] != kNoFace; }
  std::size_t foreground_count() const;
  Mask foreground_mask() const;
};

// Z-buffered orthographic rasterization sampled at pixel centers. Shared
// edges are evaluated identically from both sides, so closed surfaces leave
// no cracks. With culling, faces whose facing ratio is <= 0 are skipped.
// Equal depths resolve to the lower face id.
FragmentBuffer rasterize(const TriMesh& mesh, const CameraPose& pose, bool cull_backfaces);

struct DepthMap {
  int width = 0;
  int height = 0;
  double near_plane = 0.0;
  double far_plane = 1.0;
  std::vector<float> depth;

  bool valid(std::size_t i) const { return depth[i] != kBackground; }
  // Conditioning image: near -> 1, far -> 0, background 0.
  ImageF normalized() const;
};

DepthMap render_depth(const FragmentBuffer& frag);

// View-space unit normals; n_z is the facing ratio toward the camera.
struct NormalMap {
  int width = 0;
  int height = 0;
  std::vector<std::array<float, 3>> normal;
  std::vector<std::uint8_t> valid;
  std::vector<std::uint8_t> foreground;

  // RGB visualization n * 0.5 + 0.5, black where invalid.
  ImageF visualize() const;
};

// Central differences of view-space positions, one-sided next to background.
// Pixels lacking a foreground neighbour along either axis are invalid.
NormalMap normals_from_depth(const DepthMap& depth, const CameraPose& pose);

// True (reject) where the pixel is foreground and its facing ratio is below
// tau_keep. Foreground pixels without a valid normal count as facing ratio 0.
Mask frontal_filter_mask(const NormalMap& normals, double tau_keep);

// True (reject) where culled and unculled depth disagree by more than
// eps * (far - near) or exactly one of them is background.
Mask internal_face_mask(const DepthMap& depth_culled, const DepthMap& depth_nocull, double eps);

// Nearest-texel lookup of the textured mask at each pixel's UV.
Mask render_texture_mask(const FragmentBuffer& frag, const TextureMask& tmask);

// Bilinear texture lookup that only blends painted texels; a lookup with no
// painted texel in its footprint returns mid-gray. Background is black.
ImageF render_rgb(const FragmentBuffer& frag, const UvTexture& tex);

// Everything rendered for one camera: the culled buffers drive generator
// conditioning, the unculled buffers provide the screen -> UV mapping.
struct ViewRender {
  CameraPose pose;
  FragmentBuffer culled;
  FragmentBuffer nocull;
  DepthMap depth_culled;
  DepthMap depth_nocull;
};

ViewRender render_view(const TriMesh& mesh, const CameraPose& pose);

struct FilterSettings {
  double tau_keep = 0.3;
  double depth_eps = 1e-3;
  bool frontal = true;
  bool internal = true;
};

struct RejectMasks {
  Mask frontal;
  Mask internal;
  Mask combined;
  std::size_t frontal_count = 0;
  std::size_t internal_count = 0;
};

// Filter masks for splatting through the unculled mapping. Counts are over
// unculled foreground pixels.
RejectMasks compute_reject_masks(const ViewRender& view, const FilterSettings& settings);

}  // namespace maketex
