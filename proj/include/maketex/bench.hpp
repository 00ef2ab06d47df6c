#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "maketex/mesh.hpp"
#include "maketex/pipeline.hpp"

namespace maketex {

// Wall-clock samples per phase over repeated mock-generator pipeline runs.
// Generator time is excluded from every phase.
struct BenchReport {
  std::map<std::string, std::vector<double>> samples;  // rasterize, select, splat, uv_fill, total

  double median(const std::string& phase) const;
  nlohmann::json to_json() const;
};

double median_of(std::vector<double> values);

BenchReport bench_pipeline(const TriMesh& mesh, const PipelineConfig& config, int repetitions);

// Median seconds to splat a width x width image (every pixel foreground)
// into a fresh texture_size^2 texture.
double bench_splat(int image_size, int texture_size, int repetitions);

}  // namespace maketex
