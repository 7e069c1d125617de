#pragma once

#include <map>
#include <optional>
#include <vector>

#include "voidd/matching.hpp"
#include "voidd/vessel_map.hpp"

namespace voidd {

/// 1 - exp(-d / lambda).
double phi(double d, double lambda);

struct TrackEntry {
    int frame = 0;
    int phase = 0;
    FeaturePair pair;
};

/// Time-ordered feature pairs, at most one per frame.
struct Track {
    int id = 0;
    std::vector<TrackEntry> entries;
};

struct TrackerConfig {
    double tip_length_px = 60.0;
    /// Exponential scale of the distance terms; defaults to the tip length.
    std::optional<double> lambda;
    double v_max_px_per_s = 50.0;
    /// Defaults to phi(tip length + v_max * frame interval).
    std::optional<double> tad_threshold;
    int new_track_top_k = 3;
    /// Point count used for the tip-to-tip distance.
    int tip_resample = 32;

    void validate() const;
    [[nodiscard]] double resolved_lambda() const { return lambda.value_or(tip_length_px); }
    [[nodiscard]] double resolved_threshold(double frame_interval_s) const;
};

/// Feature pairs of one navigation frame, best first.
struct FramePairs {
    int frame = 0;
    int phase = 0;
    std::vector<FeaturePair> pairs;
};

/// Per-phase graphs (copied) with precomputed node distances.
class GraphSet {
public:
    explicit GraphSet(const std::vector<VesselGraph>& graphs);
    GraphSet(const GraphSet&) = delete;
    GraphSet& operator=(const GraphSet&) = delete;
    GraphSet(GraphSet&&) noexcept = default;
    GraphSet& operator=(GraphSet&&) noexcept = default;

    [[nodiscard]] const GeodesicIndex* for_phase(int phase) const;

private:
    std::map<int, VesselGraph> graphs_;
    std::map<int, GeodesicIndex> index_;
};

/// Individual distances between a pair and a track; nullopt for terms that
/// cannot be evaluated.
struct TadTerms {
    double tip = 0.0;
    double voi = 0.0;
    std::optional<double> graph;
};

TadTerms tad_terms(const Track& t, const FeaturePair& p, int phase, const GraphSet& graphs, const TrackerConfig& cfg);

/// Mean of phi over the available terms. Infinite graph distances map to 1.
double track_assignment_distance(const Track& t, const FeaturePair& p, int phase, const GraphSet& graphs,
                                 const TrackerConfig& cfg);

/// Distance between the supports of two VOI candidates on one graph: 0 when
/// they share an edge interval or a node, else the shortest endpoint geodesic.
std::optional<double> voi_graph_distance(const GeodesicIndex& index, const VoiCandidate& a, const VoiCandidate& b);

struct VoiddResult {
    std::vector<Track> tracks;
    /// Index into tracks; nullopt when no track was created.
    std::optional<std::size_t> vessel_track;
    std::map<int, FeaturePair> per_frame_detection;

    [[nodiscard]] const Track* vessel() const { return vessel_track ? &tracks[*vessel_track] : nullptr; }
};

/// Frames must be in increasing frame order. Throws invalid-argument on an
/// empty sequence.
VoiddResult run_voidd(const std::vector<FramePairs>& frames, const GraphSet& graphs, const TrackerConfig& cfg,
                      double frame_interval_s);

}  // namespace voidd
