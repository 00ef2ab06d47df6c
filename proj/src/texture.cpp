#include "maketex/texture.hpp"

#include <algorithm>
#include <numeric>

#include "maketex/error.hpp"

namespace maketex {

std::size_t TextureMask::count() const {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

UvTexture::UvTexture(int r, double min_weight)
    : resolution(r),
      color_accum(static_cast<std::size_t>(r) * r * 3, 0.0),
      weight_accum(static_cast<std::size_t>(r) * r, 0.0),
      w_min(min_weight) {
  if (r <= 0) throw Error(Errc::InvalidArgument, "texture resolution must be positive");
}

UvTexture UvTexture::from_image(const ImageF& image, double weight) {
  if (image.width() != image.height() || image.channels() != 3) {
    throw Error(Errc::InvalidArgument, "texture image must be square RGB");
  }
  UvTexture tex(image.width());
  std::fill(tex.weight_accum.begin(), tex.weight_accum.end(), weight);
  for (std::size_t i = 0; i < tex.color_accum.size(); ++i) tex.color_accum[i] = weight * image[i];
  return tex;
}

TextureMask UvTexture::textured_mask() const {
  TextureMask mask(resolution);
  for (std::size_t t = 0; t < weight_accum.size(); ++t) mask.bits[t] = textured(t) ? 1 : 0;
  return mask;
}

double UvTexture::total_weight() const { return std::accumulate(weight_accum.begin(), weight_accum.end(), 0.0); }

}  // namespace maketex
