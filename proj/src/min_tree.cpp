#include "voidd/min_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "voidd/error.hpp"

namespace voidd {

double major_axis_variance(const ComponentMoments& m) {
    if (m.area <= 0) return 0.0;
    __extension__ typedef __int128 i128;
    const i128 n = m.area;
    // n^2 times the covariance entries, exact in 128-bit.
    const i128 a = n * m.sum_xx - static_cast<i128>(m.sum_x) * m.sum_x;
    const i128 c = n * m.sum_yy - static_cast<i128>(m.sum_y) * m.sum_y;
    const i128 b = n * m.sum_xy - static_cast<i128>(m.sum_x) * m.sum_y;
    const double half_sum = static_cast<double>(a + c) / 2.0;
    const double half_diff = static_cast<double>(a - c) / 2.0;
    const double off = static_cast<double>(b);
    const double lambda_n2 = half_sum + std::sqrt(half_diff * half_diff + off * off);
    const double nd = static_cast<double>(m.area);
    return lambda_n2 / (nd * nd);
}

double elongation(const ComponentMoments& m) {
    if (m.area < 3) return 0.0;
    return 4.0 * std::numbers::pi * major_axis_variance(m) / static_cast<double>(m.area);
}

namespace {

std::int32_t find_root(std::vector<std::int32_t>& zpar, std::int32_t p) {
    std::int32_t r = p;
    while (zpar[r] != r) r = zpar[r];
    while (zpar[p] != r) {
        const std::int32_t next = zpar[p];
        zpar[p] = r;
        p = next;
    }
    return r;
}

// Pixel indices sorted by increasing value, ties by index (counting sort).
std::vector<std::int32_t> sort_pixels(const GrayImage& img) {
    std::vector<std::int32_t> histogram(65537, 0);
    for (auto v : img.pixels) ++histogram[v + 1];
    std::partial_sum(histogram.begin(), histogram.end(), histogram.begin());
    std::vector<std::int32_t> order(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        order[histogram[img.pixels[i]]++] = static_cast<std::int32_t>(i);
    }
    return order;
}

}  // namespace

MinTree MinTree::build(const GrayImage& img, Connectivity connectivity) {
    img.validate();
    const int w = img.width;
    const int h = img.height;
    const auto n = static_cast<std::int32_t>(img.pixels.size());
    const auto& f = img.pixels;

    const std::vector<std::int32_t> order = sort_pixels(img);
    std::vector<std::int32_t> par(n, -1);
    std::vector<std::int32_t> zpar(n, -1);

    static constexpr int kDx[8] = {-1, 1, 0, 0, -1, 1, -1, 1};
    static constexpr int kDy[8] = {0, 0, -1, 1, -1, -1, 1, 1};
    const int neighbor_count = connectivity == Connectivity::Eight ? 8 : 4;

    for (const std::int32_t p : order) {
        par[p] = p;
        zpar[p] = p;
        const int x = p % w;
        const int y = p / w;
        for (int k = 0; k < neighbor_count; ++k) {
            const int nx = x + kDx[k];
            const int ny = y + kDy[k];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::int32_t q = ny * w + nx;
            if (zpar[q] < 0) continue;  // not processed yet
            const std::int32_t r = find_root(zpar, q);
            if (r != p) {
                par[r] = p;
                zpar[r] = p;
            }
        }
    }

    // Level compression: every pixel ends up pointing at the canonical element
    // of its own-level component or of its parent component.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const std::int32_t p = *it;
        const std::int32_t q = par[p];
        if (f[par[q]] == f[q]) par[p] = par[q];
    }

    auto is_canonical = [&](std::int32_t p) { return par[p] == p || f[par[p]] != f[p]; };

    MinTree tree;
    tree.width_ = w;
    tree.height_ = h;
    tree.connectivity_ = connectivity;

    std::vector<NodeId> node_of(n, -1);
    for (const std::int32_t p : order) {
        if (is_canonical(p)) {
            node_of[p] = static_cast<NodeId>(tree.level_.size());
            tree.level_.push_back(f[p]);
        }
    }
    const auto node_count = tree.level_.size();
    tree.parent_.assign(node_count, 0);
    for (const std::int32_t p : order) {
        if (node_of[p] < 0) continue;
        tree.parent_[node_of[p]] = par[p] == p ? node_of[p] : node_of[par[p]];
    }

    tree.pixel_node_.resize(n);
    tree.moments_.assign(node_count, ComponentMoments{});
    for (std::int32_t p = 0; p < n; ++p) {
        const NodeId id = is_canonical(p) ? node_of[p] : node_of[par[p]];
        tree.pixel_node_[p] = id;
        tree.moments_[id].add_pixel(p % w, p / w);
    }
    for (std::size_t id = 0; id + 1 < node_count; ++id) {
        tree.moments_[tree.parent_[id]] += tree.moments_[id];
    }
    tree.attribute_.resize(node_count);
    for (std::size_t id = 0; id < node_count; ++id) tree.attribute_[id] = elongation(tree.moments_[id]);
    return tree;
}

bool MinTree::is_ancestor(NodeId ancestor, NodeId node) const {
    while (node < ancestor) node = parent_[node];
    return node == ancestor;
}

BinaryMask MinTree::component_mask(NodeId n) const {
    std::vector<std::uint8_t> inside(static_cast<std::size_t>(n) + 1, 0);
    inside[n] = 1;
    for (NodeId id = n - 1; id >= 0; --id) inside[id] = parent_[id] <= n ? inside[parent_[id]] : 0;
    BinaryMask mask(width_, height_);
    for (std::size_t i = 0; i < pixel_node_.size(); ++i) {
        const NodeId id = pixel_node_[i];
        if (id <= n && inside[id]) mask.bits[i] = 1;
    }
    return mask;
}

void MinTree::children(std::vector<std::int32_t>& child_start, std::vector<NodeId>& child_list) const {
    const auto count = parent_.size();
    child_start.assign(count + 1, 0);
    for (std::size_t id = 0; id + 1 < count; ++id) ++child_start[parent_[id] + 1];
    std::partial_sum(child_start.begin(), child_start.end(), child_start.begin());
    child_list.assign(count > 0 ? count - 1 : 0, 0);
    std::vector<std::int32_t> fill(child_start.begin(), child_start.end() - 1);
    for (std::size_t id = 0; id + 1 < count; ++id) child_list[fill[parent_[id]]++] = static_cast<NodeId>(id);
}

void TipSegConfig::validate() const {
    if (!(t_min > 0.0) || !(t_min < t_max)) throw_invalid_argument("tip segmentation needs 0 < t_min < t_max");
    if (!(a_min > 0) || !(a_min < a_max)) throw_invalid_argument("tip segmentation needs 0 < a_min < a_max");
    if (presmooth_sigma < 0.0) throw_invalid_argument("presmooth_sigma must be >= 0");
    if (max_candidates < 1) throw_invalid_argument("max_candidates must be >= 1");
    if (min_curve_length < 0.0) throw_invalid_argument("min_curve_length must be >= 0");
}

std::vector<double> regularized_attribute(const MinTree& tree) {
    const auto count = tree.node_count();
    std::vector<double> reg(count);
    for (std::size_t id = 0; id < count; ++id) reg[id] = tree.attribute(static_cast<MinTree::NodeId>(id));
    for (std::size_t id = 0; id + 1 < count; ++id) {
        const auto p = tree.parent(static_cast<MinTree::NodeId>(id));
        const double own = tree.attribute(static_cast<MinTree::NodeId>(id));
        const double up = tree.attribute(p);
        reg[id] = std::max(reg[id], up);
        reg[p] = std::max(reg[p], own);
    }
    return reg;
}

std::vector<MinTree::NodeId> select_tip_nodes(const MinTree& tree, const TipSegConfig& cfg) {
    cfg.validate();
    const auto count = tree.node_count();
    if (count == 0) return {};
    const auto reg = regularized_attribute(tree);
    const MinTree::NodeId root = tree.root();

    std::vector<std::uint8_t> qualifies(count, 0);
    for (std::size_t id = 0; id < count; ++id) {
        const auto area = tree.area(static_cast<MinTree::NodeId>(id));
        qualifies[id] = reg[id] > cfg.t_min && reg[id] <= cfg.t_max && area >= cfg.a_min && area <= cfg.a_max;
    }

    // Top-down: a qualifying node survives only if no ancestor qualifies.
    std::vector<std::uint8_t> ancestor_qualifies(count, 0);
    std::vector<MinTree::NodeId> selected;
    for (auto id = root; id >= 0; --id) {
        const auto p = tree.parent(id);
        ancestor_qualifies[id] = id == root ? 0 : (qualifies[p] || ancestor_qualifies[p]);
        if (qualifies[id] && !ancestor_qualifies[id]) selected.push_back(id);
    }
    std::sort(selected.begin(), selected.end(), [&](auto a, auto b) {
        if (reg[a] != reg[b]) return reg[a] > reg[b];
        return a < b;
    });
    return selected;
}

std::vector<TipComponent> select_tip_components(const MinTree& tree, const TipSegConfig& cfg) {
    auto selected = select_tip_nodes(tree, cfg);
    if (selected.size() > static_cast<std::size_t>(cfg.max_candidates)) selected.resize(cfg.max_candidates);
    const auto count = tree.node_count();
    if (selected.empty()) return {};
    const auto reg = regularized_attribute(tree);

    // Selected nodes are never nested, so each pixel has at most one selected
    // ancestor.
    std::vector<std::int32_t> slot(count, -1);
    std::vector<TipComponent> out;
    out.reserve(selected.size());
    for (const auto id : selected) {
        slot[id] = static_cast<std::int32_t>(out.size());
        TipComponent c;
        c.node = id;
        c.score = reg[id];
        c.area = tree.area(id);
        c.mask = BinaryMask(tree.width(), tree.height());
        out.push_back(std::move(c));
    }
    std::vector<std::int32_t> owner(count, -1);
    for (auto id = tree.root(); id >= 0; --id) {
        owner[id] = slot[id] >= 0 ? slot[id] : (id == tree.root() ? -1 : owner[tree.parent(id)]);
    }
    const auto& pixel_nodes = tree.pixel_nodes();
    for (std::size_t i = 0; i < pixel_nodes.size(); ++i) {
        const auto o = owner[pixel_nodes[i]];
        if (o >= 0) out[o].mask.bits[i] = 1;
    }
    return out;
}

}  // namespace voidd
