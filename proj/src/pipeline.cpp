#include "maketex/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "maketex/png_io.hpp"
#include "maketex/viewsel.hpp"

namespace maketex {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string file_label(ViewLabel label) {
  std::string s(to_string(label));
  std::replace(s.begin(), s.end(), ' ', '_');
  return s;
}

}  // namespace

CropRecord compute_crop(const Mask& foreground, int gen_size, double margin) {
  const int w = foreground.width();
  const int h = foreground.height();
  int min_x = w;
  int max_x = -1;
  int min_y = h;
  int max_y = -1;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (foreground.at(x, y) == 0) continue;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  if (max_x < 0) throw Error(Errc::EmptyForeground, "view shows no foreground");
  const int mx = static_cast<int>(std::lround(margin * (max_x - min_x + 1)));
  const int my = static_cast<int>(std::lround(margin * (max_y - min_y + 1)));
  const int x0 = min_x - mx;
  const int x1 = max_x + mx;
  const int y0 = min_y - my;
  const int y1 = max_y + my;
  const int frame = std::min(w, h);
  const int side = std::min(frame, std::max(x1 - x0 + 1, y1 - y0 + 1));
  auto place = [side](int lo, int hi, int limit) {
    const double centre = 0.5 * (lo + hi + 1);
    const int start = static_cast<int>(std::lround(centre - 0.5 * side));
    return std::clamp(start, 0, limit - side);
  };
  return {place(x0, x1, w), place(y0, y1, h), side, frame, gen_size};
}

ImageF crop_resize(const ImageF& image, const CropRecord& crop) {
  const int g = crop.gen_size;
  ImageF out(g, g, image.channels());
  const double scale = static_cast<double>(crop.size) / g;
  const int lo_x = crop.x0;
  const int lo_y = crop.y0;
  const int hi = crop.size - 1;
  for (int gy = 0; gy < g; ++gy) {
    const double sy = std::clamp((gy + 0.5) * scale - 0.5, 0.0, static_cast<double>(hi));
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, hi);
    const double fy = sy - y0;
    for (int gx = 0; gx < g; ++gx) {
      const double sx = std::clamp((gx + 0.5) * scale - 0.5, 0.0, static_cast<double>(hi));
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, hi);
      const double fx = sx - x0;
      for (int c = 0; c < image.channels(); ++c) {
        const double top = (1 - fx) * image.at(lo_x + x0, lo_y + y0, c) + fx * image.at(lo_x + x1, lo_y + y0, c);
        const double bottom = (1 - fx) * image.at(lo_x + x0, lo_y + y1, c) + fx * image.at(lo_x + x1, lo_y + y1, c);
        out.at(gx, gy, c) = static_cast<float>((1 - fy) * top + fy * bottom);
      }
    }
  }
  return out;
}

Mask crop_resize(const Mask& mask, const CropRecord& crop) {
  const int g = crop.gen_size;
  Mask out(g, g);
  const double scale = static_cast<double>(crop.size) / g;
  for (int gy = 0; gy < g; ++gy) {
    const int sy = std::min(crop.size - 1, static_cast<int>((gy + 0.5) * scale));
    for (int gx = 0; gx < g; ++gx) {
      const int sx = std::min(crop.size - 1, static_cast<int>((gx + 0.5) * scale));
      out.at(gx, gy) = mask.at(crop.x0 + sx, crop.y0 + sy);
    }
  }
  return out;
}

ImageF uncrop(const ImageF& image, const CropRecord& crop, const Mask* gen_foreground) {
  const int g = crop.gen_size;
  const int ch = image.channels();
  ImageF out(crop.frame_size, crop.frame_size, ch, 0.F);
  const double scale = static_cast<double>(g) / crop.size;
  for (int py = 0; py < crop.size; ++py) {
    const double gyf = std::clamp((py + 0.5) * scale - 0.5, 0.0, static_cast<double>(g - 1));
    const int gy0 = static_cast<int>(gyf);
    const double fy = gyf - gy0;
    for (int px = 0; px < crop.size; ++px) {
      const double gxf = std::clamp((px + 0.5) * scale - 0.5, 0.0, static_cast<double>(g - 1));
      const int gx0 = static_cast<int>(gxf);
      const double fx = gxf - gx0;
      double acc[4] = {0, 0, 0, 0};
      double wsum = 0.0;
      double plain[4] = {0, 0, 0, 0};
      for (int k = 0; k < 4; ++k) {
        const int gx = std::min(gx0 + (k & 1), g - 1);
        const int gy = std::min(gy0 + (k >> 1), g - 1);
        const double w = ((k & 1) != 0 ? fx : 1 - fx) * ((k >> 1) != 0 ? fy : 1 - fy);
        const bool fg = gen_foreground == nullptr || gen_foreground->at(gx, gy) != 0;
        for (int c = 0; c < ch; ++c) {
          plain[c] += w * image.at(gx, gy, c);
          if (fg) acc[c] += w * image.at(gx, gy, c);
        }
        if (fg) wsum += w;
      }
      for (int c = 0; c < ch; ++c) {
        const double v = wsum > 1e-9 ? acc[c] / wsum : plain[c];
        out.at(crop.x0 + px, crop.y0 + py, c) = static_cast<float>(v);
      }
    }
  }
  return out;
}

Mask uncrop(const Mask& mask, const CropRecord& crop) {
  const int g = crop.gen_size;
  Mask out(crop.frame_size, crop.frame_size);
  const double scale = static_cast<double>(g) / crop.size;
  for (int py = 0; py < crop.size; ++py) {
    const int gy = std::min(g - 1, static_cast<int>((py + 0.5) * scale));
    for (int px = 0; px < crop.size; ++px) {
      const int gx = std::min(g - 1, static_cast<int>((px + 0.5) * scale));
      out.at(crop.x0 + px, crop.y0 + py) = mask.at(gx, gy);
    }
  }
  return out;
}

CroppedView crop_and_resize(const ImageF& depth, const Mask& inpaint, const ImageF& init, const Mask& foreground,
                            int gen_size) {
  if (!depth.same_size(inpaint) || !depth.same_size(init) || !depth.same_size(foreground)) {
    throw Error(Errc::SizeMismatch, "view images differ in size");
  }
  CroppedView out;
  out.crop = compute_crop(foreground, gen_size);
  out.depth = crop_resize(depth, out.crop);
  out.inpaint = crop_resize(inpaint, out.crop);
  out.init = crop_resize(init, out.crop);
  out.foreground = crop_resize(foreground, out.crop);
  return out;
}

Mask erode(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  Mask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y) == 0) continue;
      bool all = true;
      for (int dy = -1; dy <= 1 && all; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (mask.at(nx, ny) == 0) {
            all = false;
            break;
          }
        }
      }
      out.at(x, y) = all ? 1 : 0;
    }
  }
  return out;
}

void PipelineConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(Errc::InvalidArgument, what);
  };
  require(texture_size > 0 && render_size > 0 && gen_size > 0, "sizes must be positive");
  require(gen_size <= render_size, "gen_size must not exceed render_size");
  require(n_views >= 2, "n_views must be at least 2 (front and back)");
  require(n_candidates >= 1, "n_candidates must be at least 1");
  require(radius > 0.0, "radius must be positive");
  require(ortho_half_extent >= 1.0, "ortho half extent must be >= 1");
  require(tau_keep >= 0.0 && tau_keep < 1.0, "tau_keep must lie in [0, 1)");
  require(depth_diff_eps > 0.0, "depth_eps must be positive");
  require(coverage_stop > 0.0 && coverage_stop <= 1.0, "coverage_stop must lie in (0, 1]");
  require(min_gain_fraction >= 0.0 && min_gain_fraction < 1.0, "min_gain must lie in [0, 1)");
  for (const auto* s : {&first_stage, &later_stages}) {
    require(s->w_depth >= 0.0 && s->w_depth <= 2.0, "w_depth must lie in [0, 2]");
    require(s->w_inpaint >= 0.0 && s->w_inpaint <= 2.0, "w_inpaint must lie in [0, 2]");
    require(s->strength >= 0.0 && s->strength <= 1.0, "strength must lie in [0, 1]");
  }
}

PhaseTimes& PhaseTimes::operator+=(const PhaseTimes& o) {
  rasterize += o.rasterize;
  select += o.select;
  generate += o.generate;
  splat += o.splat;
  uv_fill += o.uv_fill;
  total += o.total;
  return *this;
}

nlohmann::json to_json(const StageRecord& r) {
  return {
      {"index", r.index},
      {"azimuth", r.pose.azimuth},
      {"elevation", r.pose.elevation},
      {"radius", r.pose.radius},
      {"label", std::string(to_string(r.label))},
      {"prompt", r.prompt},
      {"coverage_before", r.coverage_before},
      {"coverage_after", r.coverage_after},
      {"frontal_rejected", r.frontal_rejected},
      {"internal_rejected", r.internal_rejected},
      {"splatted_pixels", r.splatted_pixels},
      {"elapsed",
       {{"rasterize", r.elapsed.rasterize},
        {"select", r.elapsed.select},
        {"generate", r.elapsed.generate},
        {"splat", r.elapsed.splat}}},
  };
}

std::string augment_prompt(const std::string& prompt, ViewLabel label) {
  return prompt + ", " + std::string(to_string(label)) + " view";
}

std::string front_back_prompt(const std::string& prompt) { return prompt + ", front and back view"; }

namespace {

enum class Mode { Texture, Enhance };

struct PreparedView {
  StageRecord record;
  ViewRender view;
  Mask keep;
  Mask inpaint;
  ImageF init;
  CroppedView cropped;
};

class Runner {
 public:
  Runner(const TriMesh& mesh, const std::string& prompt, const PipelineConfig& cfg, Generator& gen,
         const PipelineObserver& observer, Mode mode, const ImageF* lq, double strength)
      : prompt_(prompt), cfg_(cfg), gen_(gen), observer_(observer), mode_(mode), strength_(strength) {
    cfg_.validate();
    auto [normalized, norm] = normalize(mesh);
    mesh_ = std::move(normalized);
    result_.normalization = norm;
    const int r = cfg_.texture_size;
    result_.accum = UvTexture(r);
    result_.chart = chart_mask(mesh_, r);
    tmask_ = TextureMask(r);
    if (lq != nullptr) lq_ = UvTexture::from_image(*lq);
  }

  PipelineResult run() {
    const auto start = Clock::now();
    try {
      first_stage();
      later_stages();
    } catch (const Error& e) {
      if (is_generator_error(e.code()) && cfg_.dump_dir) dump_partial();
      throw;
    }
    const auto fill_start = Clock::now();
    result_.prefill_texture = commit(result_.accum, cfg_.fill);
    result_.prefill_coverage = coverage();
    const int rounds = cfg_.fill_rounds < 0 ? cfg_.texture_size : cfg_.fill_rounds;
    FillResult filled = uv_fill(result_.prefill_texture, tmask_, result_.chart, rounds, cfg_.fill);
    result_.texture = std::move(filled.texture);
    result_.textured = std::move(filled.textured);
    result_.final_coverage = uv_coverage(result_.textured, result_.chart);
    result_.timings.uv_fill = seconds_since(fill_start);
    result_.timings.total = seconds_since(start);
    if (cfg_.dump_dir) dump_records();
    return std::move(result_);
  }

 private:
  StageParams stage_params(bool first) const {
    StageParams p = first ? cfg_.first_stage : cfg_.later_stages;
    if (mode_ == Mode::Enhance) p.strength = strength_;
    return p;
  }

  double coverage() const { return uv_coverage(tmask_, result_.chart); }

  PreparedView prepare(const CameraPose& pose, int index, const std::string& prompt) {
    const auto start = Clock::now();
    PreparedView p;
    p.record.index = index;
    p.record.pose = pose;
    p.record.label = view_label(pose);
    p.record.prompt = prompt;
    p.view = render_view(mesh_, pose);
    const int s = pose.image_size;
    if (mode_ == Mode::Texture) {
      p.keep = render_texture_mask(p.view.culled, tmask_);
      p.init = render_rgb(p.view.culled, result_.accum);
      p.inpaint = erode(p.keep);
      for (auto& v : p.inpaint.values()) v = v != 0 ? 0 : 1;
    } else {
      p.keep = Mask(s, s);
      p.init = render_rgb(p.view.culled, lq_);
      p.inpaint = Mask(s, s, 1, 1);
    }
    p.cropped = crop_and_resize(p.view.depth_culled.normalized(), p.inpaint, p.init, p.view.nocull.foreground_mask(),
                                cfg_.gen_size);
    p.record.elapsed.rasterize = seconds_since(start);
    return p;
  }

  GeneratorRequest request_for(const CroppedView& c, const std::string& prompt, bool first, std::uint64_t stream) const {
    const StageParams params = stage_params(first);
    GeneratorRequest req;
    req.prompt = prompt;
    req.depth = c.depth;
    req.inpaint_mask = c.inpaint;
    req.init_rgb = c.init;
    req.w_depth = params.w_depth;
    req.w_inpaint = params.w_inpaint;
    req.strength = params.strength;
    req.seed = mix_seed(cfg_.seed, stream);
    req.size = cfg_.gen_size;
    return req;
  }

  GeneratorResponse call_generator(const GeneratorRequest& req, double& elapsed) {
    const auto start = Clock::now();
    GeneratorResponse resp = gen_.generate(req);
    elapsed = seconds_since(start);
    if (resp.rgb.width() != req.width() || resp.rgb.height() != req.size || resp.rgb.channels() != 3) {
      throw Error(Errc::ProtocolError, "generator returned an image of the wrong size");
    }
    return resp;
  }

  void finish(PreparedView& p, const ImageF& generated_crop) {
    const auto start = Clock::now();
    const ImageF generated = uncrop(generated_crop, p.cropped.crop, &p.cropped.foreground);
    const RejectMasks masks = compute_reject_masks(p.view, cfg_.filter());
    const Mask reject = backprojection_reject(mesh_, p.view, masks);
    p.record.elapsed.rasterize += seconds_since(start);

    const auto splat_start = Clock::now();
    p.record.coverage_before = coverage();
    tmask_ = splat(generated, p.view.nocull, reject, result_.accum);
    p.record.coverage_after = coverage();
    p.record.elapsed.splat = seconds_since(splat_start);

    p.record.frontal_rejected = masks.frontal_count;
    p.record.internal_rejected = masks.internal_count;
    for (std::size_t i = 0; i < p.view.nocull.size(); ++i) {
      if (p.view.nocull.foreground(i) && reject[i] == 0) ++p.record.splatted_pixels;
    }
    p.record.elapsed.total = p.record.elapsed.rasterize + p.record.elapsed.select + p.record.elapsed.generate +
                             p.record.elapsed.splat;
    result_.timings += p.record.elapsed;
    if (observer_) observer_(ViewObservation{p.record, p.view, masks, reject, generated});
    if (cfg_.dump_dir) dump_view(p, masks, generated);
    result_.stages.push_back(p.record);
  }

  void first_stage() {
    const auto [front, back] = front_back_pair(cfg_.radius, cfg_.ortho_half_extent, cfg_.render_size);
    const std::string prompt = front_back_prompt(prompt_);
    std::vector<PreparedView> views;
    views.push_back(prepare(front, 1, prompt));
    views.push_back(prepare(back, 2, prompt));

    const std::vector<ImageF> depths{views[0].cropped.depth, views[1].cropped.depth};
    const std::vector<Mask> masks{views[0].cropped.inpaint, views[1].cropped.inpaint};
    const std::vector<ImageF> inits{views[0].cropped.init, views[1].cropped.init};
    auto [grid, layout] = make_grid(depths, masks, inits);
    GeneratorRequest req = request_for(CroppedView{grid.depth, grid.inpaint_mask, grid.init_rgb, {}, {}}, prompt,
                                       true, 0);
    double elapsed = 0.0;
    const GeneratorResponse resp = call_generator(req, elapsed);
    const auto tiles = split_grid(resp.rgb, layout);
    for (std::size_t k = 0; k < views.size(); ++k) {
      views[k].record.elapsed.generate = elapsed / static_cast<double>(views.size());
      finish(views[k], tiles[k]);
    }
  }

  void later_stages() {
    CandidateSet cands(fibonacci_lattice(cfg_.n_candidates, cfg_.radius, cfg_.ortho_half_extent, cfg_.render_size));
    int views = 2;
    while (views < cfg_.n_views && coverage() < cfg_.coverage_stop) {
      const auto select_start = Clock::now();
      const auto next = select_next(mesh_, tmask_, cands, cfg_.min_gain_fraction);
      const double select_time = seconds_since(select_start);
      if (!next) {
        result_.timings.select += select_time;
        break;
      }
      cands.mark_used(*next);
      const CameraPose& pose = cands.poses[*next];
      ++views;
      PreparedView p = prepare(pose, views, augment_prompt(prompt_, view_label(pose)));
      p.record.elapsed.select = select_time;
      const GeneratorRequest req = request_for(p.cropped, p.record.prompt, false, static_cast<std::uint64_t>(views));
      const GeneratorResponse resp = call_generator(req, p.record.elapsed.generate);
      finish(p, resp.rgb);
    }
  }

  std::filesystem::path stage_dir(const StageRecord& r) const {
    return *cfg_.dump_dir / ("stage" + std::to_string(r.index) + "_" + file_label(r.label));
  }

  void dump_view(const PreparedView& p, const RejectMasks& masks, const ImageF& generated) const {
    const auto dir = stage_dir(p.record);
    std::filesystem::create_directories(dir);
    const std::string stem = dir.filename().string() + "_";
    png::write16(dir / (stem + "depth.png"), p.view.depth_culled.normalized());
    png::write_mask(dir / (stem + "mask.png"), p.keep);
    png::write_mask(dir / (stem + "inpaint.png"), p.inpaint);
    png::write8(dir / (stem + "normal.png"), normals_from_depth(p.view.depth_nocull, p.view.pose).visualize());
    png::write8(dir / (stem + "init.png"), p.init);
    png::write8(dir / (stem + "rgb.png"), generated);
    png::write_mask(dir / (stem + "frontal.png"), masks.frontal);
    png::write_mask(dir / (stem + "internal.png"), masks.internal);
  }

  void dump_records() const {
    std::filesystem::create_directories(*cfg_.dump_dir);
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : result_.stages) records.push_back(to_json(r));
    std::ofstream out(*cfg_.dump_dir / "stages.json");
    out << records.dump(2) << '\n';
  }

  void dump_partial() const {
    std::filesystem::create_directories(*cfg_.dump_dir);
    png::write8(*cfg_.dump_dir / "partial_texture.png", png::flip_rows(commit(result_.accum, cfg_.fill)));
    dump_records();
  }

  TriMesh mesh_;
  std::string prompt_;
  PipelineConfig cfg_;
  Generator& gen_;
  const PipelineObserver& observer_;
  Mode mode_;
  double strength_;
  UvTexture lq_;
  TextureMask tmask_;
  PipelineResult result_;
};

}  // namespace

PipelineResult texture_mesh(const TriMesh& mesh, const std::string& prompt, const PipelineConfig& config,
                            Generator& generator, const PipelineObserver& observer) {
  return Runner(mesh, prompt, config, generator, observer, Mode::Texture, nullptr, 1.0).run();
}

PipelineResult enhance_texture(const TriMesh& mesh, const ImageF& lq_texture, const std::string& prompt,
                               double strength, const PipelineConfig& config, Generator& generator,
                               const PipelineObserver& observer) {
  if (!(strength >= 0.0 && strength <= 1.0)) throw Error(Errc::InvalidArgument, "strength must lie in [0, 1]");
  if (lq_texture.width() != config.texture_size || lq_texture.height() != config.texture_size ||
      lq_texture.channels() != 3) {
    throw Error(Errc::InvalidArgument, "input texture must be texture_size x texture_size RGB");
  }
  return Runner(mesh, prompt, config, generator, observer, Mode::Enhance, &lq_texture, strength).run();
}

}  // namespace maketex
