#include <doctest.h>

#include <cmath>

#include "voidd/error.hpp"
#include "voidd/matching.hpp"
#include "voidd/tracker.hpp"

using namespace voidd;

namespace {

// Trunk (10,40)-(40,40), upper branch to (70,10), lower branch to (70,70).
VesselGraph y_graph() {
    BinaryMask m(80, 80);
    for (int x = 10; x <= 40; ++x) m.set(x, 40);
    for (int k = 1; k <= 30; ++k) {
        m.set(40 + k, 40 - k);
        m.set(40 + k, 40 + k);
    }
    return build_graph(m, 0);
}

// Tip along trunk then upper branch, starting `advance` px past x = 20.
TipCandidate upper_tip(double advance, Point2 offset = {0.5, 0.5}) {
    std::vector<Point2> pts;
    const double start = 20.0 + advance;
    for (double x = start; x < 40.0; x += 1.0) pts.push_back(Point2{x, 40.0} + offset);
    for (int k = 0; k <= 20; ++k) pts.push_back(Point2{40.0 + k, 40.0 - k} + offset);
    return TipCandidate{Polyline::cleaned(pts), 1.0, 0};
}

bool uses_upper_branch(const VesselGraph& g, const VoiCandidate& v) {
    for (const auto& step : v.edge_path) {
        const auto& e = g.edges[step.edge_id];
        for (const int n : {e.node_a, e.node_b}) {
            if (g.nodes[n].kind == NodeKind::Endpoint && g.nodes[n].pos.y < 20.0) return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("phi values") {
    CHECK(phi(0.0, 10.0) == 0.0);
    CHECK(phi(10.0, 10.0) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK(phi(std::numeric_limits<double>::infinity(), 10.0) == 1.0);
}

TEST_CASE("admissible paths end near the tip extremities") {
    const VesselGraph g = y_graph();
    const TipCandidate tip = upper_tip(0.0);
    const MatchConfig cfg;
    const auto paths = admissible_paths(g, tip, cfg);
    REQUIRE_FALSE(paths.empty());
    CHECK(paths.size() <= static_cast<std::size_t>(cfg.max_paths));
    const Polyline& best = paths.front().polyline;
    const double d = std::min(distance(best.front(), tip.curve.front()) + distance(best.back(), tip.curve.back()),
                              distance(best.front(), tip.curve.back()) + distance(best.back(), tip.curve.front()));
    CHECK(d < 3.0);
    CHECK(uses_upper_branch(g, paths.front()));
}

TEST_CASE("best feature pair follows the navigated branch") {
    const VesselGraph g = y_graph();
    const MatchConfig cfg;
    const auto pairs = extract_feature_pairs({upper_tip(0.0)}, g, cfg);
    REQUIRE_FALSE(pairs.empty());
    CHECK(uses_upper_branch(g, pairs.front().voi));
    CHECK(pairs.front().residual < 1.5);
    CHECK(pairs.front().score > 0.8);
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        CHECK_FALSE(pair_ranks_before(pairs[i], pairs[i - 1]));
        CHECK(pairs[i].score <= pairs[i - 1].score);
    }
    CHECK(extract_feature_pairs(std::vector<TipCandidate>{}, g, cfg).empty());
}

TEST_CASE("far away tip has no pairs") {
    const VesselGraph g = y_graph();
    const TipCandidate far{Polyline({{200, 200}, {260, 200}}), 1.0, 0};
    CHECK(extract_feature_pairs({far}, g, MatchConfig{}).empty());
}

TEST_CASE("match config validation") {
    MatchConfig cfg;
    cfg.max_paths = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = MatchConfig{};
    cfg.min_length_factor = 5.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("track assignment distance") {
    const VesselGraph g = y_graph();
    const GraphSet graphs({g});
    const TrackerConfig cfg;
    const auto pairs = extract_feature_pairs({upper_tip(0.0)}, g, MatchConfig{});
    REQUIRE_FALSE(pairs.empty());
    Track t;
    t.entries.push_back({0, 0, pairs.front()});
    CHECK(track_assignment_distance(t, pairs.front(), 0, graphs, cfg) == doctest::Approx(0.0));

    // Different phase: no graph term.
    const TadTerms other_phase = tad_terms(t, pairs.front(), 1, graphs, cfg);
    CHECK_FALSE(other_phase.graph.has_value());

    BinaryMask split(100, 40);
    for (int x = 5; x < 45; ++x) split.set(x, 10);
    for (int x = 55; x < 95; ++x) split.set(x, 30);
    const VesselGraph two = build_graph(split, 0);
    const GraphSet two_set({two});
    REQUIRE(two.edges.size() == 2);
    auto make_pair = [&](int edge) {
        VoiCandidate voi{0, {{edge, true}}, {edge, 0.0}, {edge, 30.0},
                         Polyline(sub_polyline(two.edges[edge].polyline, 0.0, 30.0))};
        return FeaturePair{TipCandidate{Polyline({{10, 10}, {40, 10}}), 1.0, 0}, voi, 0.0, 0.0, 1.0};
    };
    Track t2;
    t2.entries.push_back({0, 0, make_pair(0)});
    const TadTerms terms = tad_terms(t2, make_pair(1), 0, two_set, cfg);
    REQUIRE(terms.graph.has_value());
    CHECK(std::isinf(*terms.graph));
    CHECK(phi(*terms.graph, cfg.resolved_lambda()) == 1.0);
}

TEST_CASE("consistent pairs form a single track") {
    const VesselGraph g = y_graph();
    const GraphSet graphs({g});
    std::vector<FramePairs> frames;
    for (int f = 0; f < 6; ++f) {
        frames.push_back({f, 0, extract_feature_pairs({upper_tip(1.5 * f)}, g, MatchConfig{})});
        REQUIRE_FALSE(frames.back().pairs.empty());
    }
    const VoiddResult r = run_voidd(frames, graphs, TrackerConfig{}, 1.0 / 15.0);
    REQUIRE(r.vessel() != nullptr);
    CHECK(r.vessel()->entries.size() == 6);
    CHECK(r.per_frame_detection.size() == 6);
    for (const auto& t : r.tracks) {
        for (std::size_t i = 1; i < t.entries.size(); ++i) CHECK(t.entries[i].frame > t.entries[i - 1].frame);
    }
}

TEST_CASE("new tracks are limited to the top ranked pairs") {
    const VesselGraph g = y_graph();
    const GraphSet graphs({g});
    const auto pairs = extract_feature_pairs({upper_tip(0.0)}, g, MatchConfig{});
    REQUIRE_FALSE(pairs.empty());
    FramePairs frame{0, 0, std::vector<FeaturePair>(5, pairs.front())};
    const VoiddResult r = run_voidd({frame}, graphs, TrackerConfig{}, 1.0 / 15.0);
    CHECK(r.tracks.size() == 3);
    CHECK(*r.vessel_track == 0);
    CHECK_THROWS_AS(run_voidd({}, graphs, TrackerConfig{}, 0.1), Error);
}
