#include "voidd/serialization.hpp"

#include "voidd/error.hpp"
#include "voidd/json_util.hpp"

namespace voidd {

using nlohmann::json;

json points_to_json(std::span<const Point2> pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back({p.x, p.y});
    return arr;
}

std::vector<Point2> points_from_json(const json& j, const std::string& field) {
    if (!j.is_array()) throw_validation(field, "expected an array of [x, y] pairs");
    std::vector<Point2> pts;
    pts.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& p = j[i];
        const std::string where = field + "[" + std::to_string(i) + "]";
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw_validation(where, "expected [x, y]");
        }
        pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return pts;
}

json polyline_to_json(const Polyline& p) { return json{{"points", points_to_json(p.points())}}; }

Polyline polyline_from_json(const json& j, const std::string& field) {
    const std::string key = detail::join_field(field, "points");
    if (!j.is_object() || !j.contains("points")) throw_validation(key, "missing required field");
    try {
        return Polyline(points_from_json(j.at("points"), key));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidArgument) throw;
        throw_validation(key, e.detail());
    }
}

json graph_to_json(const VesselGraph& g) {
    json nodes = json::array();
    for (const auto& n : g.nodes) {
        nodes.push_back({{"id", n.id},
                         {"x", n.pos.x},
                         {"y", n.pos.y},
                         {"kind", n.kind == NodeKind::Bifurcation ? "bifurcation" : "endpoint"}});
    }
    json edges = json::array();
    for (const auto& e : g.edges) {
        edges.push_back({{"id", e.id}, {"a", e.node_a}, {"b", e.node_b}, {"points", points_to_json(e.polyline.points())}});
    }
    return json{{"phase", g.phase}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

VesselGraph graph_from_json(const json& j) {
    using detail::require;
    VesselGraph g;
    g.phase = require<int>(j, "phase");
    const auto nodes = require<json>(j, "nodes");
    const auto edges = require<json>(j, "edges");
    if (!nodes.is_array()) throw_validation("nodes", "expected an array");
    if (!edges.is_array()) throw_validation("edges", "expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string prefix = "nodes[" + std::to_string(i) + "]";
        GraphNode n;
        n.id = require<int>(nodes[i], "id", prefix);
        n.pos = {require<double>(nodes[i], "x", prefix), require<double>(nodes[i], "y", prefix)};
        const auto kind = require<std::string>(nodes[i], "kind", prefix);
        if (kind == "bifurcation") {
            n.kind = NodeKind::Bifurcation;
        } else if (kind == "endpoint") {
            n.kind = NodeKind::Endpoint;
        } else {
            throw_validation(prefix + ".kind", "expected bifurcation or endpoint");
        }
        g.nodes.push_back(n);
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string prefix = "edges[" + std::to_string(i) + "]";
        const int id = require<int>(edges[i], "id", prefix);
        const int a = require<int>(edges[i], "a", prefix);
        const int b = require<int>(edges[i], "b", prefix);
        Polyline line = polyline_from_json(edges[i], prefix);
        const double len = polyline_length(line);
        g.edges.push_back(GraphEdge{id, a, b, std::move(line), len});
    }
    try {
        g.validate();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidArgument) throw;
        throw_validation("graph", e.detail());
    }
    return g;
}

json tips_to_json(int frame, const std::vector<TipCandidate>& tips) {
    json cands = json::array();
    for (const auto& t : tips) cands.push_back({{"score", t.score}, {"points", points_to_json(t.curve.points())}});
    return json{{"frame", frame}, {"candidates", std::move(cands)}};
}

std::vector<TipCandidate> tips_from_json(const json& j) {
    using detail::require;
    const int frame = require<int>(j, "frame");
    const auto cands = require<json>(j, "candidates");
    if (!cands.is_array()) throw_validation("candidates", "expected an array");
    std::vector<TipCandidate> out;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const std::string prefix = "candidates[" + std::to_string(i) + "]";
        const double score = require<double>(cands[i], "score", prefix);
        out.push_back(TipCandidate{polyline_from_json(cands[i], prefix), score, frame});
    }
    return out;
}

json voi_to_json(const VoiCandidate& v) {
    json edges = json::array();
    for (const auto& s : v.edge_path) edges.push_back({{"id", s.edge_id}, {"forward", s.forward}});
    return json{{"phase", v.phase},
                {"edges", std::move(edges)},
                {"start", {{"edge", v.start.edge_id}, {"offset", v.start.offset}}},
                {"end", {{"edge", v.end.edge_id}, {"offset", v.end.offset}}},
                {"points", points_to_json(v.polyline.points())}};
}

json pairs_to_json(const std::vector<FeaturePair>& pairs) {
    json arr = json::array();
    for (const auto& p : pairs) {
        arr.push_back({{"score", p.score},
                       {"frechet", p.frechet},
                       {"residual", p.residual},
                       {"tip_points", points_to_json(p.tip.curve.points())},
                       {"voi", voi_to_json(p.voi)}});
    }
    return arr;
}

json tree_to_json(const MinTree& tree) {
    json nodes = json::array();
    for (std::size_t n = 0; n < tree.node_count(); ++n) {
        const auto id = static_cast<MinTree::NodeId>(n);
        nodes.push_back({{"id", id},
                         {"parent", tree.parent(id)},
                         {"level", tree.level(id)},
                         {"area", tree.area(id)},
                         {"attr", tree.attribute(id)}});
    }
    json runs = json::array();
    const auto& px = tree.pixel_nodes();
    for (std::size_t i = 0; i < px.size();) {
        std::size_t j = i;
        while (j < px.size() && px[j] == px[i]) ++j;
        runs.push_back({px[i], j - i});
        i = j;
    }
    return json{{"width", tree.width()},
                {"height", tree.height()},
                {"connectivity", static_cast<int>(tree.connectivity())},
                {"nodes", std::move(nodes)},
                {"pixel_node", std::move(runs)}};
}

}  // namespace voidd
