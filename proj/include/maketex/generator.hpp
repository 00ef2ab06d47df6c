#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maketex/error.hpp"
#include "maketex/image.hpp"

namespace maketex {

// One call of the depth-aware inpainting image generator. All images share
// one height (`size`); single views are square, grids are k * size wide.
struct GeneratorRequest {
  std::string prompt;
  ImageF depth;        // 1 channel, near = 1, background = 0
  Mask inpaint_mask;   // 1 = regenerate, 0 = keep init_rgb
  ImageF init_rgb;     // 3 channels; mid-gray where nothing is painted yet
  double w_depth = 1.0;    // [0, 2]
  double w_inpaint = 1.0;  // [0, 2]
  double strength = 1.0;   // [0, 1]; 1 regenerates fully, < 1 keeps part of init_rgb
  std::uint64_t seed = 0;
  int size = 512;

  int width() const { return depth.width(); }
  // Throws InvalidArgument on shape or range violations.
  void validate() const;
};

struct GeneratorResponse {
  ImageF rgb;
  std::string generator_id;
  std::chrono::duration<double> elapsed{0.0};
};

struct BatchItem {
  std::optional<GeneratorResponse> response;
  std::optional<Errc> error;
  std::string message;

  bool ok() const { return response.has_value(); }
};

class Generator {
 public:
  virtual ~Generator() = default;

  virtual GeneratorResponse generate(const GeneratorRequest& request) = 0;

  // Results in request order, each equal to a sequential generate() call.
  // Throws InvalidBatch on an empty batch; other failures are per item.
  virtual std::vector<BatchItem> generate_batch(std::span<const GeneratorRequest> requests);

  virtual std::string id() const = 0;
};

// Deterministic stand-ins used by tests, benchmarks and dry runs. Each mock
// computes a content image from the conditioning and then composites:
//   regenerated = (1 - strength) * init + strength * content
//   keep pixels = k * init + (1 - k) * regenerated,  k = clamp(w_inpaint, 0, 1)
enum class MockKind {
  Flat,        // constant color hashed from the prompt over the foreground
  DepthShade,  // depth replicated into RGB
  Checker,     // seeded two-color checkerboard over the foreground
  Identity,    // returns init_rgb
};

class MockGenerator final : public Generator {
 public:
  explicit MockGenerator(MockKind kind) : kind_(kind) {}

  GeneratorResponse generate(const GeneratorRequest& request) override;
  std::string id() const override;

  // Color used by the flat mock for `prompt`; channels are multiples of 1/255.
  static Color flat_color(std::string_view prompt);

 private:
  MockKind kind_;
};

// Parses mock:flat | mock:depthshade | mock:checker | mock:identity |
// http:<url> | http (url from MAT_GENERATOR_URL or http://127.0.0.1:8000).
std::unique_ptr<Generator> make_generator(std::string_view uri);

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool operator==(const Rect&) const = default;
};

struct GridLayout {
  std::vector<Rect> slots;
};

// Concatenates 2..4 equally sized views left to right. Prompt and control
// fields of the returned request are left for the caller.
std::pair<GeneratorRequest, GridLayout> make_grid(std::span<const ImageF> depths, std::span<const Mask> masks,
                                                  std::span<const ImageF> inits);

template <class T>
std::vector<Image<T>> split_grid(const Image<T>& grid, const GridLayout& layout);

extern template std::vector<ImageF> split_grid(const ImageF&, const GridLayout&);
extern template std::vector<Mask> split_grid(const Mask&, const GridLayout&);

// splitmix64; derives per-stage seeds from the run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace maketex
