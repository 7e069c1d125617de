#pragma once

#include <optional>
#include <vector>

#include "voidd/geometry.hpp"
#include "voidd/image.hpp"

namespace voidd {

/// Multi-scale dark-ridge measure plus the cross-ridge direction (unit vector
/// along the eigenvector of the larger Hessian eigenvalue) at the winning scale.
struct VesselnessMap {
    RealImage response;
    RealImage normal_x;
    RealImage normal_y;
};

/// Per pixel, max over scales of sigma^2 * l2 * max(0, 1 - |l1| / |l2|) where
/// l1 <= l2 are the Hessian eigenvalues of the Gaussian-smoothed image;
/// 0 whenever l2 <= 0. Scales must lie in [0.5, 8] px.
VesselnessMap vesselness(const GrayImage& img, const std::vector<double>& scales);

/// Keeps local maxima across the ridge that are linked (8-connected, through
/// pixels >= t_low) to a pixel >= t_high.
BinaryMask nms_hysteresis(const VesselnessMap& map, double t_low, double t_high);

enum class NodeKind { Bifurcation, Endpoint };

struct GraphNode {
    int id = 0;
    Point2 pos;
    NodeKind kind = NodeKind::Endpoint;
};

struct GraphEdge {
    int id = 0;
    int node_a = 0;
    int node_b = 0;
    Polyline polyline;  // runs from node_a to node_b
    double length = 0.0;
};

/// Undirected centerline graph of one reference frame. Parallel edges and
/// self-loops are allowed (projective superimposition).
struct VesselGraph {
    int phase = 0;
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;

    [[nodiscard]] std::vector<int> degrees() const;
    /// Throws invalid-argument if ids are not dense or endpoints disagree.
    void validate() const;
};

/// Location on an edge, measured by arc length from node_a.
struct GraphPosition {
    int edge_id = 0;
    double offset = 0.0;

    friend bool operator==(const GraphPosition&, const GraphPosition&) = default;
};

Point2 position_point(const VesselGraph& g, const GraphPosition& pos);

struct GraphBuildConfig {
    /// Edges between two junctions shorter than this are contracted.
    double contract_length = 5.0;
    /// Moving-average window (pixels) for sub-pixel edge smoothing.
    int smoothing_window = 5;
};

/// Junction pixels (>= 3 skeletal neighbors) clustered into bifurcations,
/// degree-1 pixels into endpoints, junction-free paths into edges.
VesselGraph build_graph(const BinaryMask& centerline, int phase, const GraphBuildConfig& cfg = {});

/// Shortest along-graph distance; nullopt if the positions are disconnected.
std::optional<double> geodesic(const VesselGraph& g, const GraphPosition& a, const GraphPosition& b);

/// All-pairs node distances for repeated geodesic queries on one graph.
class GeodesicIndex {
public:
    explicit GeodesicIndex(const VesselGraph& g);

    [[nodiscard]] std::optional<double> distance(const GraphPosition& a, const GraphPosition& b) const;
    [[nodiscard]] double node_distance(int a, int b) const { return dist_[static_cast<std::size_t>(a) * n_ + b]; }
    [[nodiscard]] const VesselGraph& graph() const noexcept { return *graph_; }

private:
    const VesselGraph* graph_;
    std::size_t n_ = 0;
    std::vector<double> dist_;
};

struct VesselExtractionConfig {
    std::vector<double> scales = {1.5, 2.5, 4.0};
    /// Absolute thresholds; when unset t_high is the given percentile of the
    /// nonzero response and t_low = t_high * low_ratio.
    std::optional<double> t_high;
    std::optional<double> t_low;
    double high_percentile = 0.95;
    double low_ratio = 1.0 / 3.0;
    /// Centerline components smaller than this many pixels are discarded.
    int min_component = 15;
    /// Terminal branches shorter than this are pruned before graph building.
    int spur_length = 8;
    /// End points are bridged to other centerline pixels within this radius.
    double gap_radius = 5.0;
    GraphBuildConfig graph;

    void validate() const;
};

struct HysteresisThresholds {
    double low = 0.0;
    double high = 0.0;
};

HysteresisThresholds resolve_thresholds(const VesselnessMap& map, const VesselExtractionConfig& cfg);

/// Thinning, small-component removal, gap bridging and spur pruning of a raw
/// centerline mask.
BinaryMask clean_centerline(const BinaryMask& raw, const VesselExtractionConfig& cfg);

/// vesselness -> NMS + hysteresis -> cleanup -> graph.
VesselGraph extract_vessel_graph(const GrayImage& reference, int phase, const VesselExtractionConfig& cfg);

}  // namespace voidd
