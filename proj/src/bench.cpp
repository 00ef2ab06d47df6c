#include "maketex/bench.hpp"

#include <algorithm>
#include <chrono>

#include "maketex/backproject.hpp"
#include "maketex/shapes.hpp"

namespace maketex {

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double BenchReport::median(const std::string& phase) const {
  auto it = samples.find(phase);
  return it == samples.end() ? 0.0 : median_of(it->second);
}

nlohmann::json BenchReport::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [phase, values] : samples) {
    out[phase] = {{"samples", values}, {"median", median_of(values)}};
  }
  return out;
}

BenchReport bench_pipeline(const TriMesh& mesh, const PipelineConfig& config, int repetitions) {
  if (repetitions < 1) throw Error(Errc::InvalidArgument, "repetitions must be at least 1");
  PipelineConfig cfg = config;
  cfg.dump_dir.reset();
  MockGenerator gen(MockKind::Flat);
  BenchReport report;
  for (const char* phase : {"rasterize", "select", "splat", "uv_fill", "total"}) report.samples[phase];
  for (int i = 0; i < repetitions; ++i) {
    const PipelineResult r = texture_mesh(mesh, "bench", cfg, gen);
    const PhaseTimes& t = r.timings;
    report.samples["rasterize"].push_back(t.rasterize);
    report.samples["select"].push_back(t.select);
    report.samples["splat"].push_back(t.splat);
    report.samples["uv_fill"].push_back(t.uv_fill);
    report.samples["total"].push_back(t.total - t.generate);
  }
  return report;
}

double bench_splat(int image_size, int texture_size, int repetitions) {
  if (repetitions < 1) throw Error(Errc::InvalidArgument, "repetitions must be at least 1");
  // A quad filling the frame so every pixel carries a fragment.
  const TriMesh quad = shapes::quad(1.0, 0.0);
  CameraPose pose;
  pose.ortho_half_extent = 1.0;
  pose.image_size = image_size;
  const FragmentBuffer frag = rasterize(quad, pose, true);
  ImageF image(image_size, image_size, 3);
  for (int y = 0; y < image_size; ++y) {
    for (int x = 0; x < image_size; ++x) {
      image.at(x, y, 0) = static_cast<float>(x) / image_size;
      image.at(x, y, 1) = static_cast<float>(y) / image_size;
      image.at(x, y, 2) = 0.5F;
    }
  }
  const Mask reject(image_size, image_size);
  std::vector<double> times;
  for (int i = 0; i < repetitions; ++i) {
    UvTexture tex(texture_size);
    const auto start = std::chrono::steady_clock::now();
    splat(image, frag, reject, tex);
    times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return median_of(times);
}

}  // namespace maketex
