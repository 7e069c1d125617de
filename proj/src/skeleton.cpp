#include "voidd/skeleton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <tuple>

#include "voidd/error.hpp"

namespace voidd {

namespace {

constexpr std::array<int, 8> kNx = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr std::array<int, 8> kNy = {0, -1, -1, -1, 0, 1, 1, 1};

int count_components(unsigned members, bool four_adjacency, bool only_touching_four_neighbors) {
    std::array<int, 8> label{};
    label.fill(-1);
    int components = 0;
    for (int start = 0; start < 8; ++start) {
        if (!(members >> start & 1u) || label[start] >= 0) continue;
        bool touches_four = false;
        std::array<int, 8> stack{};
        int top = 0;
        stack[top++] = start;
        label[start] = components;
        while (top > 0) {
            const int k = stack[--top];
            touches_four = touches_four || (k % 2 == 0);
            for (int j = 0; j < 8; ++j) {
                if (!(members >> j & 1u) || label[j] >= 0) continue;
                const int dx = std::abs(kNx[k] - kNx[j]);
                const int dy = std::abs(kNy[k] - kNy[j]);
                const bool adjacent = four_adjacency ? dx + dy == 1 : (dx <= 1 && dy <= 1);
                if (adjacent) {
                    label[j] = components;
                    stack[top++] = j;
                }
            }
        }
        if (!only_touching_four_neighbors || touches_four) ++components;
    }
    return components;
}

std::array<bool, 256> build_simple_table() {
    std::array<bool, 256> table{};
    for (unsigned c = 0; c < 256; ++c) {
        const int fg = count_components(c, false, false);
        const int bg = count_components(~c & 0xFFu, true, true);
        table[c] = fg == 1 && bg == 1;
    }
    return table;
}

const std::array<bool, 256>& simple_table() {
    static const std::array<bool, 256> table = build_simple_table();
    return table;
}

int popcount8(unsigned c) { return __builtin_popcount(c & 0xFFu); }

}  // namespace

bool is_simple_configuration(unsigned neighbors) { return simple_table()[neighbors & 0xFFu]; }

unsigned neighborhood_code(const BinaryMask& mask, int x, int y) {
    unsigned code = 0;
    for (int k = 0; k < 8; ++k) {
        if (mask.get(x + kNx[k], y + kNy[k])) code |= 1u << k;
    }
    return code;
}

BinaryMask thin(const BinaryMask& mask) {
    BinaryMask out = mask;
    const auto& table = simple_table();
    // Direction bits checked for a border pixel: N, S, E, W.
    constexpr std::array<int, 4> kBorderBit = {2, 6, 0, 4};
    bool changed = true;
    std::vector<std::pair<int, int>> candidates;
    while (changed) {
        changed = false;
        for (const int border : kBorderBit) {
            candidates.clear();
            for (int y = 0; y < out.height; ++y) {
                for (int x = 0; x < out.width; ++x) {
                    if (out.bits[out.index(x, y)] && !out.get(x + kNx[border], y + kNy[border])) {
                        candidates.emplace_back(x, y);
                    }
                }
            }
            for (const auto& [x, y] : candidates) {
                const unsigned code = neighborhood_code(out, x, y);
                if (code >> border & 1u) continue;
                if (popcount8(code) < 2) continue;  // end point or isolated pixel
                if (!table[code]) continue;
                out.set(x, y, false);
                changed = true;
            }
        }
    }
    return out;
}

namespace {

struct PixelGraph {
    std::vector<int> xs;
    std::vector<int> ys;
    std::vector<std::vector<int>> adj;
};

PixelGraph pixel_graph(const BinaryMask& skel) {
    PixelGraph g;
    std::vector<int> id(skel.bits.size(), -1);
    for (int y = 0; y < skel.height; ++y) {
        for (int x = 0; x < skel.width; ++x) {
            if (!skel.bits[skel.index(x, y)]) continue;
            id[skel.index(x, y)] = static_cast<int>(g.xs.size());
            g.xs.push_back(x);
            g.ys.push_back(y);
        }
    }
    g.adj.resize(g.xs.size());
    for (std::size_t v = 0; v < g.xs.size(); ++v) {
        for (int k = 0; k < 8; ++k) {
            const int nx = g.xs[v] + kNx[k];
            const int ny = g.ys[v] + kNy[k];
            if (skel.get(nx, ny)) g.adj[v].push_back(id[skel.index(nx, ny)]);
        }
    }
    return g;
}

// Removes terminal branches (end point up to, not including, a junction) of
// fewer than `min_len` pixels.
BinaryMask prune_spurs(const BinaryMask& skel, int min_len) {
    const PixelGraph g = pixel_graph(skel);
    BinaryMask out = skel;
    for (std::size_t v = 0; v < g.xs.size(); ++v) {
        if (g.adj[v].size() != 1) continue;
        std::vector<int> branch{static_cast<int>(v)};
        int prev = -1;
        int cur = static_cast<int>(v);
        bool hit_junction = false;
        while (static_cast<int>(branch.size()) <= min_len) {
            int next = -1;
            for (const int n : g.adj[cur]) {
                if (n != prev && std::find(branch.begin(), branch.end(), n) == branch.end()) {
                    next = n;
                    break;
                }
            }
            if (next < 0) break;
            if (g.adj[next].size() >= 3) {
                hit_junction = true;
                break;
            }
            if (g.adj[next].size() == 1) break;
            prev = cur;
            cur = next;
            branch.push_back(cur);
        }
        if (hit_junction && static_cast<int>(branch.size()) < min_len) {
            for (const int b : branch) out.set(g.xs[b], g.ys[b], false);
        }
    }
    return out;
}

void dijkstra(const PixelGraph& g, int source, std::vector<double>& dist, std::vector<int>& pred) {
    dist.assign(g.xs.size(), std::numeric_limits<double>::infinity());
    pred.assign(g.xs.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (const int n : g.adj[v]) {
            const bool diagonal = g.xs[n] != g.xs[v] && g.ys[n] != g.ys[v];
            const double nd = d + (diagonal ? std::numbers::sqrt2 : 1.0);
            if (nd < dist[n] - 1e-12 || (std::abs(nd - dist[n]) <= 1e-12 && v < pred[n])) {
                dist[n] = nd;
                pred[n] = v;
                heap.emplace(nd, n);
            }
        }
    }
}

}  // namespace

Polyline skeleton_to_curve(const BinaryMask& skel) {
    const BinaryMask pruned = prune_spurs(skel, 3);
    const PixelGraph g = pixel_graph(pruned);
    if (g.xs.size() < 2) throw Error(ErrorKind::DegenerateSkeleton, "skeleton has fewer than 2 pixels");

    // Pixels are enumerated in raster order, so index order equals (y, x) order.
    std::vector<int> ends;
    for (std::size_t v = 0; v < g.xs.size(); ++v) {
        if (g.adj[v].size() == 1) ends.push_back(static_cast<int>(v));
    }
    if (ends.empty()) throw Error(ErrorKind::DegenerateSkeleton, "skeleton is a closed loop without end points");

    std::vector<double> dist;
    std::vector<int> pred;
    double best_len = -1.0;
    int best_a = -1;
    int best_b = -1;
    for (const int a : ends) {
        dijkstra(g, a, dist, pred);
        for (std::size_t b = 0; b < g.xs.size(); ++b) {
            const bool is_end = g.adj[b].size() == 1;
            if (ends.size() >= 2 && !is_end) continue;
            if (static_cast<int>(b) == a || !std::isfinite(dist[b])) continue;
            const int lo = std::min(a, static_cast<int>(b));
            const int hi = std::max(a, static_cast<int>(b));
            const bool longer = dist[b] > best_len + 1e-9;
            const bool tie = std::abs(dist[b] - best_len) <= 1e-9 &&
                             std::tie(lo, hi) < std::tie(best_a, best_b);
            if (longer || tie) {
                best_len = dist[b];
                best_a = lo;
                best_b = hi;
            }
        }
    }
    if (best_a < 0) throw Error(ErrorKind::DegenerateSkeleton, "skeleton has no path between end points");

    // Root the walk at the (y, x)-smaller endpoint so the first point is it.
    dijkstra(g, best_b, dist, pred);
    std::vector<Point2> pts;
    for (int v = best_a; v >= 0; v = pred[v]) {
        pts.push_back({static_cast<double>(g.xs[v]), static_cast<double>(g.ys[v])});
        if (v == best_b) break;
    }
    return Polyline(std::move(pts));
}

}  // namespace voidd
