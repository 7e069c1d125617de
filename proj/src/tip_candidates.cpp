#include "voidd/tip_candidates.hpp"

#include "voidd/error.hpp"
#include "voidd/skeleton.hpp"

namespace voidd {

GrayImage prepare_navigation_frame(const GrayImage& frame, double sigma) {
    if (sigma <= 0.0) return frame;
    return to_gray(gaussian_smooth(to_real(frame), sigma), frame.bit_depth);
}

std::vector<TipCandidate> tip_candidates_from_tree(const MinTree& tree, const TipSegConfig& cfg, int frame_index) {
    std::vector<TipCandidate> out;
    const auto reg = regularized_attribute(tree);
    for (const auto node : select_tip_nodes(tree, cfg)) {
        if (out.size() >= static_cast<std::size_t>(cfg.max_candidates)) break;
        try {
            Polyline curve = skeleton_to_curve(thin(tree.component_mask(node)));
            if (polyline_length(curve) < cfg.min_curve_length) continue;
            out.push_back(TipCandidate{std::move(curve), reg[node], frame_index});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateSkeleton) throw;
        }
    }
    return out;
}

std::vector<TipCandidate> extract_tip_candidates(const GrayImage& frame, const TipSegConfig& cfg, int frame_index) {
    cfg.validate();
    const GrayImage prepared = prepare_navigation_frame(frame, cfg.presmooth_sigma);
    const MinTree tree = MinTree::build(prepared, cfg.connectivity);
    return tip_candidates_from_tree(tree, cfg, frame_index);
}

}  // namespace voidd
