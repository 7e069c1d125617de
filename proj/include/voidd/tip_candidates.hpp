#pragma once

#include <vector>

#include "voidd/geometry.hpp"
#include "voidd/image.hpp"
#include "voidd/min_tree.hpp"

namespace voidd {

/// Centerline of a segmented tip-like component, ordered from the endpoint
/// with smaller (y, x).
struct TipCandidate {
    Polyline curve;
    double score = 0.0;
    int source_frame = 0;
};

/// Min tree on the (optionally pre-smoothed) frame, component selection,
/// thinning and centerline ordering. Components whose skeleton cannot be
/// ordered into a curve are skipped.
std::vector<TipCandidate> extract_tip_candidates(const GrayImage& frame, const TipSegConfig& cfg, int frame_index);

/// Same as above on an already built tree.
std::vector<TipCandidate> tip_candidates_from_tree(const MinTree& tree, const TipSegConfig& cfg, int frame_index);

/// Pre-smoothing applied before tree construction; returns the input when
/// sigma is 0.
GrayImage prepare_navigation_frame(const GrayImage& frame, double sigma);

}  // namespace voidd
