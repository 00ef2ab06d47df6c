#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "maketex/camera.hpp"
#include "maketex/mesh.hpp"
#include "maketex/raster.hpp"
#include "maketex/texture.hpp"

namespace maketex {

struct CandidateSet {
  std::vector<CameraPose> poses;
  std::vector<bool> used;

  CandidateSet() = default;
  explicit CandidateSet(std::vector<CameraPose> p) : poses(std::move(p)), used(poses.size(), false) {}

  std::size_t size() const { return poses.size(); }
  // Throws InvalidArgument when the pose was already taken.
  void mark_used(std::size_t index);
};

inline constexpr double kDefaultMinGain = 0.005;

// Foreground pixels whose nearest texel is still unpainted.
std::size_t untextured_count(const FragmentBuffer& frag, const TextureMask& tmask);

// Untextured count for every unused candidate (nullopt for used ones),
// rendered with backface culling.
std::vector<std::optional<std::size_t>> score_candidates(const TriMesh& mesh, const TextureMask& tmask,
                                                         const CandidateSet& cands);

// Greedy step: the unused candidate with the most untextured foreground
// pixels, lowest index on ties. Returns nullopt (done) when no unused
// candidate reaches min_gain_fraction of its image. Throws EmptyCandidates.
std::optional<std::size_t> select_next(const TriMesh& mesh, const TextureMask& tmask, const CandidateSet& cands,
                                       double min_gain_fraction = kDefaultMinGain);

struct SelectionSettings {
  double radius = kDefaultRadius;
  double ortho_half_extent = kDefaultHalfExtent;
  int image_size = 1024;
  int texture_size = 1024;
  double min_gain_fraction = kDefaultMinGain;
  FilterSettings filter;
};

// Runs the greedy loop from an empty texture over an n-point Fibonacci
// lattice, marking each chosen view's filtered splat footprint as painted.
std::vector<std::size_t> selection_order(const TriMesh& mesh, int n_candidates, int max_views,
                                         const SelectionSettings& settings = {});

}  // namespace maketex
