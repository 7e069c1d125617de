#pragma once

#include <optional>
#include <span>
#include <vector>

#include "voidd/geometry.hpp"
#include "voidd/tip_candidates.hpp"
#include "voidd/vessel_map.hpp"

namespace voidd {

/// One traversed edge; forward means node_a -> node_b.
struct EdgeStep {
    int edge_id = 0;
    bool forward = true;

    friend bool operator==(const EdgeStep&, const EdgeStep&) = default;
};

/// Path through the iso-phase vessel graph, trimmed to start/end positions.
struct VoiCandidate {
    int phase = 0;
    std::vector<EdgeStep> edge_path;
    GraphPosition start;
    GraphPosition end;
    Polyline polyline;

    [[nodiscard]] VoiCandidate reversed() const;
};

struct FeaturePair {
    TipCandidate tip;
    VoiCandidate voi;
    double frechet = 0.0;   // raw discrete Frechet distance, tip vs VOI
    double residual = 0.0;  // discrete Frechet distance after rigid alignment
    double score = 0.0;     // exp(-residual / lambda_s)
};

struct MatchConfig {
    /// Search radius around the tip extremities; defaults to the tip length.
    std::optional<double> neighborhood_radius;
    int max_paths = 32;
    /// Score scale; defaults to a quarter of the tip length.
    std::optional<double> lambda_s;
    double frechet_reject = 25.0;
    /// Common point count for alignment and Frechet comparison.
    int resample_count = 32;
    /// Paths longer than this multiple of the tip length are not explored.
    double max_length_factor = 3.0;
    /// Paths shorter than this multiple of the tip length are dropped.
    double min_length_factor = 0.5;

    void validate() const;
};

double discrete_frechet(std::span<const Point2> p, std::span<const Point2> q);
double discrete_frechet(const Polyline& p, const Polyline& q);

/// VOI candidates whose ends lie near the tip extremities, ordered by summed
/// endpoint distance, then length, then edge ids. At most cfg.max_paths.
std::vector<VoiCandidate> admissible_paths(const VesselGraph& g, const TipCandidate& tip, const MatchConfig& cfg);

/// Scores every tip x admissible path combination and returns the surviving
/// pairs, best first.
std::vector<FeaturePair> extract_feature_pairs(const std::vector<TipCandidate>& tips, const VesselGraph& g,
                                               const MatchConfig& cfg);

/// Deterministic ranking used by extract_feature_pairs.
bool pair_ranks_before(const FeaturePair& a, const FeaturePair& b);

}  // namespace voidd
