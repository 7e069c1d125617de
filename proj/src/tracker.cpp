#include "voidd/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "voidd/error.hpp"

namespace voidd {

double phi(double d, double lambda) {
    if (!(lambda > 0.0)) throw_invalid_argument("phi needs a positive scale");
    if (std::isinf(d)) return 1.0;
    return 1.0 - std::exp(-std::max(0.0, d) / lambda);
}

void TrackerConfig::validate() const {
    if (!(tip_length_px > 0.0)) throw_invalid_argument("tracker.tip_length_px must be positive");
    if (lambda && !(*lambda > 0.0)) throw_invalid_argument("tracker.lambda must be positive");
    if (!(v_max_px_per_s >= 0.0)) throw_invalid_argument("tracker.v_max_px_per_s must be non-negative");
    if (tad_threshold && !(*tad_threshold > 0.0 && *tad_threshold < 1.0)) {
        throw_invalid_argument("tracker.tad_threshold must lie in (0, 1)");
    }
    if (new_track_top_k < 1) throw_invalid_argument("tracker.new_track_top_k must be positive");
    if (tip_resample < 2) throw_invalid_argument("tracker.tip_resample must be at least 2");
}

double TrackerConfig::resolved_threshold(double frame_interval_s) const {
    if (tad_threshold) return *tad_threshold;
    const double reach = tip_length_px + v_max_px_per_s * frame_interval_s;
    return phi(reach, resolved_lambda());
}

GraphSet::GraphSet(const std::vector<VesselGraph>& graphs) {
    for (const auto& g : graphs) {
        const auto [it, inserted] = graphs_.emplace(g.phase, g);
        if (!inserted) throw_invalid_argument("duplicate graph for phase " + std::to_string(g.phase));
        index_.emplace(g.phase, GeodesicIndex(it->second));
    }
}

const GeodesicIndex* GraphSet::for_phase(int phase) const {
    const auto it = index_.find(phase);
    return it == index_.end() ? nullptr : &it->second;
}

namespace {

double tip_distance(const Polyline& a, const Polyline& b, std::size_t k) {
    const Polyline ra = resample(a, k);
    const Polyline rb = resample(b, k);
    double same = 0.0;
    double flipped = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        same += distance(ra[i], rb[i]);
        flipped += distance(ra[i], rb[k - 1 - i]);
    }
    return std::min(same, flipped) / static_cast<double>(k);
}

double endpoint_distance(const Polyline& a, const Polyline& b) {
    const double same = distance(a.front(), b.front()) + distance(a.back(), b.back());
    const double crossed = distance(a.front(), b.back()) + distance(a.back(), b.front());
    return 0.5 * std::min(same, crossed);
}

struct Interval {
    int edge;
    double lo;
    double hi;
};

std::vector<Interval> support(const VesselGraph& g, const VoiCandidate& v) {
    std::vector<Interval> out;
    const std::size_t n = v.edge_path.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& step = v.edge_path[i];
        const double len = g.edges[step.edge_id].length;
        double from = step.forward ? 0.0 : len;
        double to = step.forward ? len : 0.0;
        if (i == 0) from = v.start.offset;
        if (i + 1 == n) to = v.end.offset;
        out.push_back({step.edge_id, std::min(from, to), std::max(from, to)});
    }
    return out;
}

std::vector<int> touched_nodes(const VesselGraph& g, const std::vector<Interval>& sup) {
    constexpr double tol = 1e-6;
    std::vector<int> nodes;
    for (const auto& iv : sup) {
        const auto& e = g.edges[iv.edge];
        if (iv.lo <= tol) nodes.push_back(e.node_a);
        if (iv.hi >= e.length - tol) nodes.push_back(e.node_b);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

}  // namespace

std::optional<double> voi_graph_distance(const GeodesicIndex& index, const VoiCandidate& a, const VoiCandidate& b) {
    const VesselGraph& g = index.graph();
    for (const auto* v : {&a, &b}) {
        for (const auto& s : v->edge_path) {
            if (s.edge_id < 0 || s.edge_id >= static_cast<int>(g.edges.size())) {
                throw_invalid_argument("VOI references edge " + std::to_string(s.edge_id) + " missing from graph");
            }
        }
    }
    const auto sa = support(g, a);
    const auto sb = support(g, b);
    for (const auto& x : sa) {
        for (const auto& y : sb) {
            if (x.edge == y.edge && x.lo <= y.hi && y.lo <= x.hi) return 0.0;
        }
    }
    const auto na = touched_nodes(g, sa);
    const auto nb = touched_nodes(g, sb);
    std::vector<int> shared;
    std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(shared));
    if (!shared.empty()) return 0.0;

    double best = std::numeric_limits<double>::infinity();
    for (const auto& pa : {a.start, a.end}) {
        for (const auto& pb : {b.start, b.end}) {
            if (const auto d = index.distance(pa, pb)) best = std::min(best, *d);
        }
    }
    if (!std::isfinite(best)) return std::nullopt;
    return best;
}

TadTerms tad_terms(const Track& t, const FeaturePair& p, int phase, const GraphSet& graphs, const TrackerConfig& cfg) {
    if (t.entries.empty()) throw_invalid_argument("track assignment distance needs a non-empty track");
    const FeaturePair& latest = t.entries.back().pair;
    TadTerms terms;
    terms.tip = tip_distance(p.tip.curve, latest.tip.curve, static_cast<std::size_t>(cfg.tip_resample));
    terms.voi = endpoint_distance(p.voi.polyline, latest.voi.polyline);
    for (auto it = t.entries.rbegin(); it != t.entries.rend(); ++it) {
        if (it->phase != phase) continue;
        const GeodesicIndex* index = graphs.for_phase(phase);
        if (index == nullptr) break;
        const auto d = voi_graph_distance(*index, p.voi, it->pair.voi);
        terms.graph = d.value_or(std::numeric_limits<double>::infinity());
        break;
    }
    return terms;
}

double track_assignment_distance(const Track& t, const FeaturePair& p, int phase, const GraphSet& graphs,
                                 const TrackerConfig& cfg) {
    const TadTerms terms = tad_terms(t, p, phase, graphs, cfg);
    const double lambda = cfg.resolved_lambda();
    double sum = phi(terms.tip, lambda) + phi(terms.voi, lambda);
    int count = 2;
    if (terms.graph) {
        sum += phi(*terms.graph, lambda);
        ++count;
    }
    return sum / count;
}

VoiddResult run_voidd(const std::vector<FramePairs>& frames, const GraphSet& graphs, const TrackerConfig& cfg,
                      double frame_interval_s) {
    cfg.validate();
    if (frames.empty()) throw_invalid_argument("run_voidd needs at least one frame");
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].frame <= frames[i - 1].frame) throw_invalid_argument("frames must be strictly increasing");
    }
    const double threshold = cfg.resolved_threshold(frame_interval_s);

    VoiddResult result;
    for (const auto& f : frames) {
        for (std::size_t rank = 0; rank < f.pairs.size(); ++rank) {
            const FeaturePair& pair = f.pairs[rank];
            double d_best = threshold;
            std::optional<std::size_t> t_best;
            for (std::size_t t = 0; t < result.tracks.size(); ++t) {
                const Track& track = result.tracks[t];
                if (track.entries.back().frame == f.frame) continue;
                const double tad = track_assignment_distance(track, pair, f.phase, graphs, cfg);
                if (tad < d_best) {
                    d_best = tad;
                    t_best = t;
                }
            }
            if (t_best) {
                result.tracks[*t_best].entries.push_back({f.frame, f.phase, pair});
            } else if (rank < static_cast<std::size_t>(cfg.new_track_top_k)) {
                Track track;
                track.id = static_cast<int>(result.tracks.size());
                track.entries.push_back({f.frame, f.phase, pair});
                result.tracks.push_back(std::move(track));
            }
        }
    }

    for (std::size_t t = 0; t < result.tracks.size(); ++t) {
        if (!result.vessel_track ||
            result.tracks[t].entries.size() > result.tracks[*result.vessel_track].entries.size()) {
            result.vessel_track = t;
        }
    }
    if (const Track* v = result.vessel()) {
        for (const auto& e : v->entries) result.per_frame_detection.emplace(e.frame, e.pair);
    }
    return result;
}

}  // namespace voidd
