#pragma once

// Independent reference computations used to freeze expected values. None of
// these call into the code paths they check.

#include <cstddef>
#include <optional>
#include <vector>

#include "maketex/camera.hpp"
#include "maketex/image.hpp"
#include "maketex/mesh.hpp"
#include "maketex/raster.hpp"
#include "maketex/texture.hpp"

namespace oracle {

struct Accumulators {
  std::vector<double> color;
  std::vector<double> weight;
};

// Double loop over pixels and every texel using the clamped tent kernel.
Accumulators naive_splat(const maketex::ImageF& image, const maketex::FragmentBuffer& frag,
                         const maketex::Mask& reject, int resolution);

struct RayHit {
  bool hit = false;
  double depth = 0.0;
  double u = 0.0;
  double v = 0.0;
  std::size_t face = 0;
};

// Casts the ray through the center of pixel (x, y) against every triangle
// (Moller-Trumbore, both sides) and returns the nearest hit.
RayHit cast_pixel(const maketex::TriMesh& mesh, const maketex::CameraPose& pose, int x, int y);

// Smallest great-circle angle from each direction to any other.
std::vector<double> nearest_neighbor_angles(const std::vector<maketex::CameraPose>& poses);

// Fraction of the projected unit disk whose sphere normal has n_z < tau.
double sphere_rejected_fraction(double tau);

// Greedy view order recomputed from scratch: every step rescores all unused
// candidates with a per-pixel nearest-texel count, takes the first maximum and
// marks its splat footprint through a plain bilinear loop.
std::vector<std::size_t> exhaustive_greedy(const maketex::TriMesh& mesh,
                                           const std::vector<maketex::CameraPose>& candidates, int texture_size,
                                           const maketex::FilterSettings& filter, std::size_t max_views,
                                           double min_gain_fraction);

}  // namespace oracle
