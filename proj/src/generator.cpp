#include "maketex/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdlib>

#include "maketex/remote_generator.hpp"

namespace maketex {
namespace {

float quantize(double v) { return static_cast<float>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)) / 255.F; }

Color hsv(double hue_deg, double s, double v) {
  const double c = v * s;
  const double hp = std::fmod(hue_deg, 360.0) / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0;
  double g = 0;
  double b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const double m = v - c;
  return {quantize(r + m), quantize(g + m), quantize(b + m)};
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

Color seeded_color(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t h = mix_seed(seed, stream);
  return hsv(static_cast<double>(h % 360), 0.5 + 0.4 * static_cast<double>((h >> 16) % 100) / 100.0,
             0.5 + 0.45 * static_cast<double>((h >> 32) % 100) / 100.0);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void GeneratorRequest::validate() const {
  if (size <= 0) throw Error(Errc::InvalidArgument, "request size must be positive");
  if (depth.channels() != 1 || init_rgb.channels() != 3 || inpaint_mask.channels() != 1) {
    throw Error(Errc::InvalidArgument, "request images have wrong channel counts");
  }
  if (!depth.same_size(inpaint_mask) || !depth.same_size(init_rgb)) {
    throw Error(Errc::InvalidArgument, "request images differ in size");
  }
  if (depth.height() != size || depth.width() < size || depth.width() % size != 0) {
    throw Error(Errc::InvalidArgument, "request images must be size tall and a multiple of size wide");
  }
  if (!(w_depth >= 0.0 && w_depth <= 2.0) || !(w_inpaint >= 0.0 && w_inpaint <= 2.0)) {
    throw Error(Errc::InvalidArgument, "control weights must lie in [0, 2]");
  }
  if (!(strength >= 0.0 && strength <= 1.0)) throw Error(Errc::InvalidArgument, "strength must lie in [0, 1]");
}

std::vector<BatchItem> Generator::generate_batch(std::span<const GeneratorRequest> requests) {
  if (requests.empty()) throw Error(Errc::InvalidBatch, "empty batch");
  std::vector<BatchItem> out(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    try {
      out[i].response = generate(requests[i]);
    } catch (const Error& e) {
      out[i].error = e.code();
      out[i].message = e.what();
    }
  }
  return out;
}

Color MockGenerator::flat_color(std::string_view prompt) {
  return hsv(static_cast<double>(fnv1a(prompt) % 360), 0.6, 0.85);
}

std::string MockGenerator::id() const {
  switch (kind_) {
    case MockKind::Flat: return "mock:flat";
    case MockKind::DepthShade: return "mock:depthshade";
    case MockKind::Checker: return "mock:checker";
    case MockKind::Identity: return "mock:identity";
  }
  return "mock";
}

GeneratorResponse MockGenerator::generate(const GeneratorRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  request.validate();
  const int w = request.width();
  const int h = request.size;
  ImageF out(w, h, 3);
  const Color flat = flat_color(request.prompt);
  const Color checker_a = seeded_color(request.seed, 0);
  const Color checker_b = seeded_color(request.seed, 1);
  const int cell = std::max(1, h / 8);
  const double s = request.strength;
  const double keep = std::clamp(request.w_inpaint, 0.0, 1.0);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float d = request.depth.at(x, y);
      float content[3] = {0.F, 0.F, 0.F};
      switch (kind_) {
        case MockKind::Flat:
          if (d > 0.F) content[0] = flat.r, content[1] = flat.g, content[2] = flat.b;
          break;
        case MockKind::DepthShade:
          content[0] = content[1] = content[2] = d;
          break;
        case MockKind::Checker:
          if (d > 0.F) {
            const Color& c = ((x / cell + y / cell) % 2 == 0) ? checker_a : checker_b;
            content[0] = c.r, content[1] = c.g, content[2] = c.b;
          }
          break;
        case MockKind::Identity:
          for (int c = 0; c < 3; ++c) content[c] = request.init_rgb.at(x, y, c);
          break;
      }
      const bool regenerate = request.inpaint_mask.at(x, y) != 0;
      for (int c = 0; c < 3; ++c) {
        const double init = request.init_rgb.at(x, y, c);
        const double regen = (1.0 - s) * init + s * content[c];
        out.at(x, y, c) = static_cast<float>(regenerate ? regen : keep * init + (1.0 - keep) * regen);
      }
    }
  }
  return {std::move(out), id(), std::chrono::steady_clock::now() - start};
}

std::unique_ptr<Generator> make_generator(std::string_view uri) {
  if (uri == "mock:flat") return std::make_unique<MockGenerator>(MockKind::Flat);
  if (uri == "mock:depthshade") return std::make_unique<MockGenerator>(MockKind::DepthShade);
  if (uri == "mock:checker") return std::make_unique<MockGenerator>(MockKind::Checker);
  if (uri == "mock:identity") return std::make_unique<MockGenerator>(MockKind::Identity);
  if (uri == "http" || uri == "http:") {
    const char* env = std::getenv("MAT_GENERATOR_URL");
    return std::make_unique<RemoteGenerator>(env != nullptr && *env != '\0' ? env : kDefaultGeneratorUrl);
  }
  if (uri.starts_with("http:")) {
    auto url = std::string(uri.substr(5));
    while (!url.empty() && std::isspace(static_cast<unsigned char>(url.back()))) url.pop_back();
    return std::make_unique<RemoteGenerator>(url);
  }
  throw Error(Errc::InvalidArgument, "unknown generator '" + std::string(uri) + "'");
}

std::pair<GeneratorRequest, GridLayout> make_grid(std::span<const ImageF> depths, std::span<const Mask> masks,
                                                  std::span<const ImageF> inits) {
  const std::size_t n = depths.size();
  if (n < 2 || n > 4 || masks.size() != n || inits.size() != n) {
    throw Error(Errc::SizeMismatch, "grid needs 2 to 4 views with depth, mask and init each");
  }
  const int w = depths[0].width();
  const int h = depths[0].height();
  for (std::size_t k = 0; k < n; ++k) {
    if (depths[k].width() != w || depths[k].height() != h || !masks[k].same_size(depths[k]) ||
        !inits[k].same_size(depths[k]) || depths[k].channels() != 1 || inits[k].channels() != 3) {
      throw Error(Errc::SizeMismatch, "grid views differ in size");
    }
  }
  GeneratorRequest req;
  req.size = h;
  const int gw = w * static_cast<int>(n);
  req.depth = ImageF(gw, h, 1);
  req.inpaint_mask = Mask(gw, h, 1);
  req.init_rgb = ImageF(gw, h, 3);
  GridLayout layout;
  for (std::size_t k = 0; k < n; ++k) {
    const int ox = static_cast<int>(k) * w;
    layout.slots.push_back({ox, 0, w, h});
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        req.depth.at(ox + x, y) = depths[k].at(x, y);
        req.inpaint_mask.at(ox + x, y) = masks[k].at(x, y);
        for (int c = 0; c < 3; ++c) req.init_rgb.at(ox + x, y, c) = inits[k].at(x, y, c);
      }
    }
  }
  return {std::move(req), std::move(layout)};
}

template <class T>
std::vector<Image<T>> split_grid(const Image<T>& grid, const GridLayout& layout) {
  std::vector<Image<T>> out;
  out.reserve(layout.slots.size());
  for (const Rect& r : layout.slots) {
    if (r.x < 0 || r.y < 0 || r.x + r.width > grid.width() || r.y + r.height > grid.height()) {
      throw Error(Errc::SizeMismatch, "grid slot outside image");
    }
    Image<T> tile(r.width, r.height, grid.channels());
    for (int y = 0; y < r.height; ++y) {
      for (int x = 0; x < r.width; ++x) {
        for (int c = 0; c < grid.channels(); ++c) tile.at(x, y, c) = grid.at(r.x + x, r.y + y, c);
      }
    }
    out.push_back(std::move(tile));
  }
  return out;
}

template std::vector<ImageF> split_grid(const ImageF&, const GridLayout&);
template std::vector<Mask> split_grid(const Mask&, const GridLayout&);

}  // namespace maketex
