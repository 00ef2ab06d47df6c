#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maketex/backproject.hpp"
#include "maketex/camera.hpp"
#include "maketex/generator.hpp"
#include "maketex/mesh.hpp"
#include "maketex/raster.hpp"
#include "maketex/texture.hpp"
#include "maketex/viewsel.hpp"

namespace maketex {

// Square crop of a rendered view and its mapping to generator resolution.
struct CropRecord {
  int x0 = 0;
  int y0 = 0;
  int size = 0;        // side of the crop square in frame pixels
  int frame_size = 0;  // side of the full render
  int gen_size = 0;
};

// Tight foreground box grown by `margin` of its extent on each side, then
// grown to a square around its center and shifted/clamped into the frame.
// Throws EmptyForeground.
CropRecord compute_crop(const Mask& foreground, int gen_size, double margin = 0.05);

ImageF crop_resize(const ImageF& image, const CropRecord& crop);  // bilinear
Mask crop_resize(const Mask& mask, const CropRecord& crop);       // nearest

// Inverse of crop_resize into a frame_size image; zero outside the crop.
// When `gen_foreground` is given, bilinear taps only blend generator pixels
// that lie on the foreground, so background color does not bleed inward.
ImageF uncrop(const ImageF& image, const CropRecord& crop, const Mask* gen_foreground = nullptr);
Mask uncrop(const Mask& mask, const CropRecord& crop);

struct CroppedView {
  ImageF depth;
  Mask inpaint;
  ImageF init;
  Mask foreground;
  CropRecord crop;
};

CroppedView crop_and_resize(const ImageF& depth, const Mask& inpaint, const ImageF& init, const Mask& foreground,
                            int gen_size);

// Keep-region erosion: a pixel stays set only if its whole 3x3 neighbourhood
// (inside the image) is set.
Mask erode(const Mask& mask);

struct StageParams {
  double w_depth = 1.0;
  double w_inpaint = 1.0;
  double strength = 1.0;
};

struct PipelineConfig {
  int texture_size = 1024;
  int render_size = 1024;
  int gen_size = 512;
  int n_views = 6;
  int n_candidates = 32;
  double radius = kDefaultRadius;
  double ortho_half_extent = kDefaultHalfExtent;
  double tau_keep = 0.3;
  double depth_diff_eps = 1e-3;
  double coverage_stop = 0.98;
  double min_gain_fraction = kDefaultMinGain;
  std::uint64_t seed = 0;
  // Front/back grid: nothing to preserve yet.
  StageParams first_stage{1.0, 0.0, 1.0};
  StageParams later_stages{1.0, 1.0, 1.0};
  bool frontal_filter = true;
  bool internal_mask = true;
  int fill_rounds = -1;  // negative: texture_size
  Color fill = kMidGray;
  std::optional<std::filesystem::path> dump_dir;

  void validate() const;
  FilterSettings filter() const { return {tau_keep, depth_diff_eps, frontal_filter, internal_mask}; }
};

struct PhaseTimes {
  double rasterize = 0.0;
  double select = 0.0;
  double generate = 0.0;
  double splat = 0.0;
  double uv_fill = 0.0;
  double total = 0.0;

  PhaseTimes& operator+=(const PhaseTimes& o);
};

struct StageRecord {
  int index = 0;  // 1-based view number
  CameraPose pose;
  ViewLabel label = ViewLabel::Front;
  std::string prompt;
  double coverage_before = 0.0;
  double coverage_after = 0.0;
  std::size_t frontal_rejected = 0;
  std::size_t internal_rejected = 0;
  std::size_t splatted_pixels = 0;
  PhaseTimes elapsed;
};

nlohmann::json to_json(const StageRecord& record);

struct PipelineResult {
  ImageF texture;           // committed and filled, R x R x 3, row 0 at v = 0
  TextureMask textured;     // after fill
  ImageF prefill_texture;   // committed before fill
  UvTexture accum;
  TextureMask chart;
  MeshNormalization normalization;
  std::vector<StageRecord> stages;
  double prefill_coverage = 0.0;
  double final_coverage = 0.0;
  PhaseTimes timings;
};

// Everything the pipeline knows about one view at splat time.
struct ViewObservation {
  const StageRecord& record;
  const ViewRender& view;
  const RejectMasks& masks;
  const Mask& reject;      // what splat skipped (filters + zero-UV faces)
  const ImageF& generated; // full-frame generated image
};

using PipelineObserver = std::function<void(const ViewObservation&)>;

// Front/back grid, then greedy views with inpainting, filtering, splatting,
// UV fill and commit.
PipelineResult texture_mesh(const TriMesh& mesh, const std::string& prompt, const PipelineConfig& config,
                            Generator& generator, const PipelineObserver& observer = {});

// Same view loop, but every view regenerates its whole foreground starting
// from a render of `lq_texture` at the given strength.
PipelineResult enhance_texture(const TriMesh& mesh, const ImageF& lq_texture, const std::string& prompt,
                               double strength, const PipelineConfig& config, Generator& generator,
                               const PipelineObserver& observer = {});

// Prompt suffixes: ", front and back view" for the grid, ", <label> view" after.
std::string augment_prompt(const std::string& prompt, ViewLabel label);
std::string front_back_prompt(const std::string& prompt);

}  // namespace maketex
