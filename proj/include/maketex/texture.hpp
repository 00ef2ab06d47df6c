#pragma once

#include <cstdint>
#include <vector>

#include "maketex/image.hpp"

namespace maketex {

// Weight above which a texel counts as painted.
inline constexpr double kDefaultMinWeight = 1e-3;

// Per-texel boolean over an R x R texture (row 0 at v = 0).
struct TextureMask {
  int resolution = 0;
  std::vector<std::uint8_t> bits;

  TextureMask() = default;
  explicit TextureMask(int r, bool value = false)
      : resolution(r), bits(static_cast<std::size_t>(r) * r, value ? 1 : 0) {}

  bool operator[](std::size_t i) const { return bits[i] != 0; }
  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * resolution + x] != 0; }
  std::size_t count() const;
};

// Splat accumulation buffer. Colors are stored premultiplied by weight; the
// committed texture is color_accum / weight_accum.
struct UvTexture {
  int resolution = 0;
  std::vector<double> color_accum;
  std::vector<double> weight_accum;
  double w_min = kDefaultMinWeight;

  UvTexture() = default;
  explicit UvTexture(int r, double min_weight = kDefaultMinWeight);

  // Fully painted texture whose committed colors equal `image` (R x R x 3).
  static UvTexture from_image(const ImageF& image, double weight = 1.0);

  std::size_t texel_count() const { return weight_accum.size(); }
  bool textured(std::size_t texel) const { return weight_accum[texel] > w_min; }
  TextureMask textured_mask() const;
  double total_weight() const;
};

}  // namespace maketex
