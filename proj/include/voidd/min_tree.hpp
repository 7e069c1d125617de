#pragma once

#include <cstdint>
#include <vector>

#include "voidd/image.hpp"

namespace voidd {

enum class Connectivity { Four = 4, Eight = 8 };

/// Raw second-order moments of a pixel set; integer so that accumulation is
/// exact and attributes are bit-identical under translation.
struct ComponentMoments {
    std::int64_t area = 0;
    std::int64_t sum_x = 0;
    std::int64_t sum_y = 0;
    std::int64_t sum_xx = 0;
    std::int64_t sum_yy = 0;
    std::int64_t sum_xy = 0;

    void add_pixel(std::int64_t x, std::int64_t y) {
        ++area;
        sum_x += x;
        sum_y += y;
        sum_xx += x * x;
        sum_yy += y * y;
        sum_xy += x * y;
    }
    ComponentMoments& operator+=(const ComponentMoments& o) {
        area += o.area;
        sum_x += o.sum_x;
        sum_y += o.sum_y;
        sum_xx += o.sum_xx;
        sum_yy += o.sum_yy;
        sum_xy += o.sum_xy;
        return *this;
    }
    friend bool operator==(const ComponentMoments&, const ComponentMoments&) = default;
};

/// Largest eigenvalue of the population covariance of the pixel coordinates.
double major_axis_variance(const ComponentMoments& m);

/// A = pi * l_max^2 / |C| with l_max = 2 sqrt(lambda_1), i.e. 4 pi lambda_1 / |C|.
/// A filled disk scores 1 and an ellipse scores its aspect ratio. Components of
/// fewer than 3 pixels score 0.
double elongation(const ComponentMoments& m);

/// Component tree of the lower level sets {p : f(p) <= lambda}. Nodes are
/// numbered so that every child id is smaller than its parent's; the root has
/// the largest id and is its own parent.
class MinTree {
public:
    using NodeId = std::int32_t;

    static MinTree build(const GrayImage& img, Connectivity connectivity = Connectivity::Four);

    [[nodiscard]] std::size_t node_count() const noexcept { return parent_.size(); }
    [[nodiscard]] NodeId root() const noexcept { return static_cast<NodeId>(parent_.size()) - 1; }
    [[nodiscard]] NodeId parent(NodeId n) const { return parent_[n]; }
    [[nodiscard]] std::uint16_t level(NodeId n) const { return level_[n]; }
    [[nodiscard]] const ComponentMoments& moments(NodeId n) const { return moments_[n]; }
    [[nodiscard]] std::int64_t area(NodeId n) const { return moments_[n].area; }
    [[nodiscard]] double attribute(NodeId n) const { return attribute_[n]; }
    /// Smallest node containing pixel i (row-major index).
    [[nodiscard]] NodeId pixel_node(std::size_t i) const { return pixel_node_[i]; }
    [[nodiscard]] const std::vector<NodeId>& pixel_nodes() const noexcept { return pixel_node_; }
    [[nodiscard]] const std::vector<NodeId>& parents() const noexcept { return parent_; }

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] Connectivity connectivity() const noexcept { return connectivity_; }

    [[nodiscard]] bool is_ancestor(NodeId ancestor, NodeId node) const;

    /// Pixels of the component (node plus all descendants).
    [[nodiscard]] BinaryMask component_mask(NodeId n) const;

    /// Child adjacency in CSR form: children of n are child_list[child_start[n] .. child_start[n+1]).
    void children(std::vector<std::int32_t>& child_start, std::vector<NodeId>& child_list) const;

private:
    int width_ = 0;
    int height_ = 0;
    Connectivity connectivity_ = Connectivity::Four;
    std::vector<NodeId> parent_;
    std::vector<std::uint16_t> level_;
    std::vector<ComponentMoments> moments_;
    std::vector<double> attribute_;
    std::vector<NodeId> pixel_node_;
};

struct TipSegConfig {
    double t_min = 5.0;
    double t_max = 150.0;
    std::int64_t a_min = 30;
    std::int64_t a_max = 3000;
    Connectivity connectivity = Connectivity::Four;
    /// Gaussian pre-smoothing of the navigation frame before tree construction;
    /// 0 disables it.
    double presmooth_sigma = 1.0;
    /// Keep at most this many candidates per frame (highest score first).
    int max_candidates = 8;
    /// Centerlines shorter than this (px) are not reported as tip candidates.
    double min_curve_length = 40.0;

    /// Throws invalid-argument when the bounds are inconsistent.
    void validate() const;
};

struct TipComponent {
    MinTree::NodeId node = 0;
    double score = 0.0;  // regularized elongation
    std::int64_t area = 0;
    BinaryMask mask;
};

/// Regularized elongation: the maximum of A over the node, its parent and its
/// children.
std::vector<double> regularized_attribute(const MinTree& tree);

/// Components with t_min < A_reg <= t_max and a_min <= |C| <= a_max; among
/// nested qualifying components only the largest survives. Sorted by score
/// descending, ties by node id. Not capped.
std::vector<MinTree::NodeId> select_tip_nodes(const MinTree& tree, const TipSegConfig& cfg);

/// The first cfg.max_candidates nodes of select_tip_nodes with their masks.
std::vector<TipComponent> select_tip_components(const MinTree& tree, const TipSegConfig& cfg);

}  // namespace voidd
