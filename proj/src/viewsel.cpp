#include "maketex/viewsel.hpp"

#include <algorithm>

#include "maketex/backproject.hpp"
#include "maketex/error.hpp"

namespace maketex {

void CandidateSet::mark_used(std::size_t index) {
  if (index >= poses.size()) throw Error(Errc::InvalidArgument, "candidate index out of range");
  if (used[index]) throw Error(Errc::InvalidArgument, "candidate selected twice");
  used[index] = true;
}

std::size_t untextured_count(const FragmentBuffer& frag, const TextureMask& tmask) {
  const Mask textured = render_texture_mask(frag, tmask);
  std::size_t n = 0;
  for (std::size_t i = 0; i < frag.size(); ++i) {
    if (frag.foreground(i) && textured[i] == 0) ++n;
  }
  return n;
}

std::vector<std::optional<std::size_t>> score_candidates(const TriMesh& mesh, const TextureMask& tmask,
                                                         const CandidateSet& cands) {
  std::vector<std::optional<std::size_t>> scores(cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c) {
    if (cands.used[c]) continue;
    scores[c] = untextured_count(rasterize(mesh, cands.poses[c], true), tmask);
  }
  return scores;
}

std::optional<std::size_t> select_next(const TriMesh& mesh, const TextureMask& tmask, const CandidateSet& cands,
                                       double min_gain_fraction) {
  if (cands.size() == 0) throw Error(Errc::EmptyCandidates, "no candidate views");
  const auto scores = score_candidates(mesh, tmask, cands);
  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (!scores[c]) continue;
    const auto& pose = cands.poses[c];
    const double min_gain = min_gain_fraction * static_cast<double>(pose.image_size) * pose.image_size;
    if (static_cast<double>(*scores[c]) < min_gain) continue;
    if (!best || *scores[c] > *scores[*best]) best = c;
  }
  return best;
}

std::vector<std::size_t> selection_order(const TriMesh& mesh, int n_candidates, int max_views,
                                         const SelectionSettings& settings) {
  std::vector<std::size_t> order;
  if (max_views <= 0) return order;
  CandidateSet cands(fibonacci_lattice(n_candidates, settings.radius, settings.ortho_half_extent, settings.image_size));
  UvTexture scratch(settings.texture_size);
  TextureMask tmask(settings.texture_size);
  const ImageF blank(settings.image_size, settings.image_size, 3, 0.F);
  while (order.size() < static_cast<std::size_t>(max_views)) {
    const auto next = select_next(mesh, tmask, cands, settings.min_gain_fraction);
    if (!next) break;
    cands.mark_used(*next);
    order.push_back(*next);
    const ViewRender view = render_view(mesh, cands.poses[*next]);
    const RejectMasks masks = compute_reject_masks(view, settings.filter);
    tmask = splat(blank, view.nocull, backprojection_reject(mesh, view, masks), scratch);
  }
  return order;
}

}  // namespace maketex
