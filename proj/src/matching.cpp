#include "voidd/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "voidd/error.hpp"

namespace voidd {

namespace {

constexpr std::size_t kMaxEnumerated = 4096;
constexpr double kEndTolerance = 1e-6;

}  // namespace

VoiCandidate VoiCandidate::reversed() const {
    VoiCandidate r{phase, {}, end, start, polyline.reversed()};
    r.edge_path.reserve(edge_path.size());
    for (auto it = edge_path.rbegin(); it != edge_path.rend(); ++it) r.edge_path.push_back({it->edge_id, !it->forward});
    return r;
}

void MatchConfig::validate() const {
    if (neighborhood_radius && !(*neighborhood_radius > 0.0)) {
        throw_invalid_argument("matching.neighborhood_radius must be positive");
    }
    if (lambda_s && !(*lambda_s > 0.0)) throw_invalid_argument("matching.lambda_s must be positive");
    if (max_paths < 1) throw_invalid_argument("matching.max_paths must be positive");
    if (!(frechet_reject > 0.0)) throw_invalid_argument("matching.frechet_reject must be positive");
    if (resample_count < 2) throw_invalid_argument("matching.resample_count must be at least 2");
    if (!(max_length_factor > 0.0)) throw_invalid_argument("matching.max_length_factor must be positive");
    if (!(min_length_factor >= 0.0 && min_length_factor < max_length_factor)) {
        throw_invalid_argument("matching.min_length_factor must lie in [0, max_length_factor)");
    }
}

double discrete_frechet(std::span<const Point2> p, std::span<const Point2> q) {
    if (p.empty() || q.empty()) throw_invalid_argument("discrete_frechet needs non-empty curves");
    const std::size_t m = q.size();
    std::vector<double> prev(m);
    std::vector<double> cur(m);
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double d = distance(p[i], q[j]);
            if (i == 0 && j == 0) {
                cur[j] = d;
            } else if (i == 0) {
                cur[j] = std::max(cur[j - 1], d);
            } else if (j == 0) {
                cur[j] = std::max(prev[j], d);
            } else {
                cur[j] = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), d);
            }
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

double discrete_frechet(const Polyline& p, const Polyline& q) { return discrete_frechet(p.points(), q.points()); }

// ---------------------------------------------------------------------------
// Path enumeration

namespace {

struct Anchor {
    GraphPosition pos;
    double dist = 0.0;  // to the tip extremity
};

std::vector<Anchor> anchors_near(const VesselGraph& g, Point2 q, double radius) {
    std::vector<Anchor> out;
    std::vector<bool> node_taken(g.nodes.size(), false);
    for (const auto& e : g.edges) {
        const auto cp = closest_point(e.polyline, q);
        if (cp.distance > radius) continue;
        double offset = cp.arclength;
        // Anchors sitting on a node are shared by all incident edges; keep one.
        int at_node = -1;
        if (offset <= kEndTolerance) {
            at_node = e.node_a;
            offset = 0.0;
        } else if (offset >= e.length - kEndTolerance) {
            at_node = e.node_b;
            offset = e.length;
        }
        if (at_node >= 0) {
            if (node_taken[at_node]) continue;
            node_taken[at_node] = true;
        }
        out.push_back({{e.id, offset}, cp.distance});
    }
    return out;
}

struct RawPath {
    std::vector<EdgeStep> steps;
    double length = 0.0;
};

class PathEnumerator {
public:
    PathEnumerator(const VesselGraph& g, double max_length) : g_(g), max_length_(max_length) {
        incident_.resize(g.nodes.size());
        for (const auto& e : g.edges) {
            incident_[e.node_a].push_back(e.id);
            if (e.node_b != e.node_a) incident_[e.node_b].push_back(e.id);
        }
    }

    [[nodiscard]] bool budget_exhausted() const { return emitted_ >= kMaxEnumerated; }

    std::vector<RawPath> run(const GraphPosition& s, const GraphPosition& t) {
        out_.clear();
        target_ = t;
        const auto& es = g_.edges[s.edge_id];
        if (s.edge_id == t.edge_id && std::abs(s.offset - t.offset) > kEndTolerance) {
            out_.push_back({{{s.edge_id, t.offset > s.offset}}, std::abs(t.offset - s.offset)});
            ++emitted_;
        }
        used_.assign(g_.edges.size(), false);
        used_[s.edge_id] = true;
        steps_.clear();
        // Leave the start edge towards node_b (forward) or node_a (backward).
        steps_.push_back({s.edge_id, true});
        dfs(es.node_b, es.length - s.offset);
        steps_.back() = {s.edge_id, false};
        dfs(es.node_a, s.offset);
        return std::move(out_);
    }

private:
    void dfs(int node, double acc) {
        if (acc > max_length_ || budget_exhausted()) return;
        const auto& et = g_.edges[target_.edge_id];
        if (!used_[target_.edge_id]) {
            if (et.node_a == node) emit({target_.edge_id, true}, acc + target_.offset);
            if (et.node_b == node) emit({target_.edge_id, false}, acc + et.length - target_.offset);
        }
        for (const int eid : incident_[node]) {
            if (used_[eid] || eid == target_.edge_id) continue;
            const auto& e = g_.edges[eid];
            used_[eid] = true;
            if (e.node_a == node) {
                steps_.push_back({eid, true});
                dfs(e.node_b, acc + e.length);
                steps_.pop_back();
            }
            if (e.node_b == node && e.node_a != e.node_b) {
                steps_.push_back({eid, false});
                dfs(e.node_a, acc + e.length);
                steps_.pop_back();
            }
            used_[eid] = false;
        }
    }

    void emit(EdgeStep last, double length) {
        if (length > max_length_ || length <= kEndTolerance || budget_exhausted()) return;
        ++emitted_;
        RawPath p{steps_, length};
        p.steps.push_back(last);
        out_.push_back(std::move(p));
    }

    const VesselGraph& g_;
    double max_length_;
    std::vector<std::vector<int>> incident_;
    std::vector<bool> used_;
    std::vector<EdgeStep> steps_;
    std::vector<RawPath> out_;
    std::size_t emitted_ = 0;
    GraphPosition target_;
};

// Polyline of a raw path from position s to position t.
std::vector<Point2> path_points(const VesselGraph& g, const RawPath& path, const GraphPosition& s,
                                const GraphPosition& t) {
    std::vector<Point2> pts;
    auto append = [&pts](std::vector<Point2> piece, bool forward) {
        if (!forward) std::reverse(piece.begin(), piece.end());
        for (const auto& p : piece) {
            if (pts.empty() || distance(pts.back(), p) > Polyline::kMinSeparation) pts.push_back(p);
        }
    };
    const std::size_t n = path.steps.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& step = path.steps[i];
        const auto& e = g.edges[step.edge_id];
        double from = step.forward ? 0.0 : e.length;
        double to = step.forward ? e.length : 0.0;
        if (i == 0) from = s.offset;
        if (i + 1 == n) to = t.offset;
        append(sub_polyline(e.polyline, from, to), step.forward);
    }
    return pts;
}

// A path anchored exactly on a node may start or end with a zero-length step;
// drop it and re-anchor on the neighbouring edge.
void trim_empty_steps(const VesselGraph& g, std::vector<EdgeStep>& steps, GraphPosition& start, GraphPosition& end) {
    if (steps.size() > 1) {
        const auto& e = g.edges[steps.front().edge_id];
        const double run = steps.front().forward ? e.length - start.offset : start.offset;
        if (run <= kEndTolerance) {
            steps.erase(steps.begin());
            const auto& next = g.edges[steps.front().edge_id];
            start = {next.id, steps.front().forward ? 0.0 : next.length};
        }
    }
    if (steps.size() > 1) {
        const auto& e = g.edges[steps.back().edge_id];
        const double run = steps.back().forward ? end.offset : e.length - end.offset;
        if (run <= kEndTolerance) {
            steps.pop_back();
            const auto& prev = g.edges[steps.back().edge_id];
            end = {prev.id, steps.back().forward ? prev.length : 0.0};
        }
    }
}

std::vector<int> edge_ids(const std::vector<EdgeStep>& steps) {
    std::vector<int> ids;
    ids.reserve(steps.size());
    for (const auto& s : steps) ids.push_back(s.edge_id);
    return ids;
}

std::vector<int> edge_ids(const VoiCandidate& v) { return edge_ids(v.edge_path); }

}  // namespace

std::vector<VoiCandidate> admissible_paths(const VesselGraph& g, const TipCandidate& tip, const MatchConfig& cfg) {
    cfg.validate();
    const double tip_length = polyline_length(tip.curve);
    const double radius = cfg.neighborhood_radius.value_or(tip_length);
    const auto starts = anchors_near(g, tip.curve.front(), radius);
    const auto ends = anchors_near(g, tip.curve.back(), radius);
    if (starts.empty() || ends.empty()) return {};

    struct Ranked {
        double endpoint_distance;
        double length;
        RawPath raw;
        GraphPosition start;
        GraphPosition end;
        std::vector<int> ids;
    };
    std::vector<Ranked> ranked;
    PathEnumerator enumerator(g, cfg.max_length_factor * tip_length);
    for (const auto& s : starts) {
        for (const auto& t : ends) {
            for (auto& raw : enumerator.run(s.pos, t.pos)) {
                if (raw.length < cfg.min_length_factor * tip_length) continue;
                Ranked r{s.dist + t.dist, raw.length, std::move(raw), s.pos, t.pos, {}};
                trim_empty_steps(g, r.raw.steps, r.start, r.end);
                r.ids = edge_ids(r.raw.steps);
                ranked.push_back(std::move(r));
            }
            if (enumerator.budget_exhausted()) break;
        }
        if (enumerator.budget_exhausted()) break;
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.endpoint_distance != b.endpoint_distance) return a.endpoint_distance < b.endpoint_distance;
        if (a.length != b.length) return a.length < b.length;
        if (a.ids != b.ids) return a.ids < b.ids;
        return std::tie(a.start.offset, a.end.offset) < std::tie(b.start.offset, b.end.offset);
    });
    std::vector<VoiCandidate> out;
    for (auto& r : ranked) {
        if (out.size() >= static_cast<std::size_t>(cfg.max_paths)) break;
        auto pts = path_points(g, r.raw, r.start, r.end);
        if (pts.size() < 2) continue;
        out.push_back(VoiCandidate{g.phase, std::move(r.raw.steps), r.start, r.end, Polyline(std::move(pts))});
    }
    return out;
}

bool pair_ranks_before(const FeaturePair& a, const FeaturePair& b) {
    if (a.score != b.score) return a.score > b.score;
    const double la = polyline_length(a.voi.polyline);
    const double lb = polyline_length(b.voi.polyline);
    if (la != lb) return la < lb;
    const auto ia = edge_ids(a.voi);
    const auto ib = edge_ids(b.voi);
    if (ia != ib) return ia < ib;
    if (a.voi.start.offset != b.voi.start.offset) return a.voi.start.offset < b.voi.start.offset;
    if (a.voi.end.offset != b.voi.end.offset) return a.voi.end.offset < b.voi.end.offset;
    const auto ta = a.tip.curve.points();
    const auto tb = b.tip.curve.points();
    return std::lexicographical_compare(ta.begin(), ta.end(), tb.begin(), tb.end(), [](Point2 p, Point2 q) {
        return std::tie(p.y, p.x) < std::tie(q.y, q.x);
    });
}

std::vector<FeaturePair> extract_feature_pairs(const std::vector<TipCandidate>& tips, const VesselGraph& g,
                                               const MatchConfig& cfg) {
    cfg.validate();
    const auto k = static_cast<std::size_t>(cfg.resample_count);
    std::vector<FeaturePair> pairs;
    for (const auto& tip : tips) {
        const double tip_length = polyline_length(tip.curve);
        const double lambda = cfg.lambda_s.value_or(0.25 * tip_length);
        const Polyline tip_pts = resample(tip.curve, k);
        for (const auto& voi : admissible_paths(g, tip, cfg)) {
            const Polyline forward = resample(voi.polyline, k);
            const Polyline backward = resample(voi.polyline.reversed(), k);
            const double raw_forward = discrete_frechet(tip_pts, forward);
            const double raw_backward = discrete_frechet(tip_pts, backward);
            const bool best_reversed = raw_backward < raw_forward;
            const Polyline& target = best_reversed ? backward : forward;
            const double best_raw = std::min(raw_forward, raw_backward);
            if (best_raw > cfg.frechet_reject) continue;
            double best_residual;
            try {
                const RigidFit fit = rigid_align(tip_pts, target);
                best_residual = discrete_frechet(fit.residual_curve, target.points());
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::DegenerateGeometry) throw;
                continue;
            }
            if (best_residual > cfg.frechet_reject) continue;
            pairs.push_back(FeaturePair{tip, best_reversed ? voi.reversed() : voi, best_raw, best_residual,
                                        std::exp(-best_residual / lambda)});
        }
    }
    std::sort(pairs.begin(), pairs.end(), pair_ranks_before);
    return pairs;
}

}  // namespace voidd
