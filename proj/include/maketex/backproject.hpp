#pragma once

#include <array>
#include <cstddef>

#include "maketex/image.hpp"
#include "maketex/mesh.hpp"
#include "maketex/raster.hpp"
#include "maketex/texture.hpp"

namespace maketex {

// Texel-space splat positions are rounded to 1/2^16 texel (ties to even). Bilinear weights
// are then exact dyadic rationals, so per-pixel weights sum to exactly 1 and
// accumulated weights are independent of summation order.
inline constexpr int kSubTexelBits = 16;

struct TexelTap {
  std::size_t texel;
  double weight;
};

// The four bilinear taps of a UV position: texel-space position
// (u*R - 0.5, v*R - 0.5), neighbours outside the texture clamped onto the
// nearest edge texel (their weight moves with them).
std::array<TexelTap, 4> bilinear_taps(float u, float v, int resolution);

// Scatters every foreground, non-rejected pixel of `image` into `tex` along
// the fragment buffer's UV mapping. Returns the updated textured mask.
// Throws ResolutionMismatch when image, fragments and reject differ in size.
TextureMask splat(const ImageF& image, const FragmentBuffer& frag, const Mask& reject, UvTexture& tex);

// Texels that receive positive weight from the selected pixels.
TextureMask splat_footprint(const FragmentBuffer& frag, const Mask& selected, int resolution);

// color_accum / weight_accum where painted, `fill` elsewhere.
ImageF commit(const UvTexture& tex, Color fill = kMidGray);

// Texels within the bilinear footprint of some UV triangle, i.e. whose
// center lies less than one texel (per axis) from the triangle. Triangles
// with zero UV area are skipped.
TextureMask chart_mask(const TriMesh& mesh, int resolution);

struct FillResult {
  ImageF texture;
  TextureMask textured;
  int rounds = 0;
};

// Dilates painted texels into unpainted chart texels, one ring per round,
// until nothing changes or max_rounds is reached. Each new texel takes the
// mean of its painted 8-neighbours from the previous round. Texels outside
// the chart are set to `fill` and stay unpainted.
FillResult uv_fill(const ImageF& committed, const TextureMask& tmask, const TextureMask& chart, int max_rounds,
                   Color fill = kMidGray);

// Painted chart texels / chart texels.
double uv_coverage(const TextureMask& tmask, const TextureMask& chart);

// Pixels whose face has (near) zero UV area; they cannot receive texture.
Mask degenerate_uv_mask(const FragmentBuffer& frag, const TriMesh& mesh);

inline constexpr double kDegenerateUvArea = 1e-12;

}  // namespace maketex

namespace maketex {

// Filter rejections plus pixels on faces with zero UV area: the full set of
// pixels a view must not splat.
Mask backprojection_reject(const TriMesh& mesh, const ViewRender& view, const RejectMasks& masks);

}  // namespace maketex
