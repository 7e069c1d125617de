#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "voidd/geometry.hpp"
#include "voidd/matching.hpp"
#include "voidd/min_tree.hpp"
#include "voidd/tip_candidates.hpp"
#include "voidd/vessel_map.hpp"

namespace voidd {

/// [[x, y], ...]
nlohmann::json points_to_json(std::span<const Point2> pts);
std::vector<Point2> points_from_json(const nlohmann::json& j, const std::string& field);

/// {"points": [[x, y], ...]}
nlohmann::json polyline_to_json(const Polyline& p);
Polyline polyline_from_json(const nlohmann::json& j, const std::string& field);

/// {phase, nodes: [{id, x, y, kind}], edges: [{id, a, b, points}]}
nlohmann::json graph_to_json(const VesselGraph& g);
VesselGraph graph_from_json(const nlohmann::json& j);

/// {frame, candidates: [{score, points}]}
nlohmann::json tips_to_json(int frame, const std::vector<TipCandidate>& tips);
std::vector<TipCandidate> tips_from_json(const nlohmann::json& j);

nlohmann::json voi_to_json(const VoiCandidate& v);
/// [{score, frechet, residual, tip_points, voi: {phase, edges, points}}]
nlohmann::json pairs_to_json(const std::vector<FeaturePair>& pairs);

/// {nodes: [{id, parent, level, area, attr}], pixel_node: [[node, run], ...]}
nlohmann::json tree_to_json(const MinTree& tree);

}  // namespace voidd
