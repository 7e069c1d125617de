#include "voidd/vessel_map.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "voidd/error.hpp"
#include "voidd/skeleton.hpp"

namespace voidd {

namespace {

constexpr int kNx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kNy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

inline int mirror(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

struct DerivativeKernels {
    std::vector<double> g0;
    std::vector<double> g1;
    std::vector<double> g2;
    int radius = 0;
};

DerivativeKernels derivative_kernels(double sigma) {
    DerivativeKernels k;
    k.radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
    const int size = 2 * k.radius + 1;
    k.g0.resize(size);
    k.g1.resize(size);
    k.g2.resize(size);
    double sum = 0.0;
    for (int i = -k.radius; i <= k.radius; ++i) {
        k.g0[i + k.radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += k.g0[i + k.radius];
    }
    const double s2 = sigma * sigma;
    for (int i = -k.radius; i <= k.radius; ++i) {
        const double g = k.g0[i + k.radius] / sum;
        k.g0[i + k.radius] = g;
        // Convolution kernels (flipped derivative of the Gaussian).
        k.g1[i + k.radius] = (i / s2) * g;
        k.g2[i + k.radius] = (i * static_cast<double>(i) / (s2 * s2) - 1.0 / s2) * g;
    }
    // Zero DC response for the second derivative.
    const double mean2 = std::accumulate(k.g2.begin(), k.g2.end(), 0.0) / size;
    for (auto& v : k.g2) v -= mean2;
    return k;
}

// out(x, y) = sum_i kx[i] * in(x - i, y), then the same along y with ky.
RealImage convolve_separable(const RealImage& in, const std::vector<double>& kx, const std::vector<double>& ky,
                             int radius) {
    RealImage tmp(in.width, in.height);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += kx[i + radius] * in.at(mirror(x - i, in.width), y);
            tmp.at(x, y) = acc;
        }
    }
    RealImage out(in.width, in.height);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += ky[i + radius] * tmp.at(x, mirror(y - i, in.height));
            out.at(x, y) = acc;
        }
    }
    return out;
}

double bilinear(const RealImage& img, double x, double y) {
    if (x < 0.0 || y < 0.0 || x > img.width - 1 || y > img.height - 1) return 0.0;
    const int x0 = std::min(static_cast<int>(std::floor(x)), img.width - 1);
    const int y0 = std::min(static_cast<int>(std::floor(y)), img.height - 1);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    return (1 - fx) * (1 - fy) * img.at(x0, y0) + fx * (1 - fy) * img.at(x1, y0) + (1 - fx) * fy * img.at(x0, y1) +
           fx * fy * img.at(x1, y1);
}

}  // namespace

VesselnessMap vesselness(const GrayImage& img, const std::vector<double>& scales) {
    img.validate();
    if (scales.empty()) throw_invalid_argument("vesselness needs at least one scale");
    for (const double s : scales) {
        if (!(s >= 0.5 && s <= 8.0)) throw_invalid_argument("vesselness scale outside [0.5, 8]: " + std::to_string(s));
    }
    // Shifting by the minimum makes the response exactly invariant to adding
    // a constant to the image.
    const auto lowest = *std::min_element(img.pixels.begin(), img.pixels.end());
    RealImage base(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) base.values[i] = static_cast<double>(img.pixels[i] - lowest);

    VesselnessMap map{RealImage(img.width, img.height), RealImage(img.width, img.height),
                      RealImage(img.width, img.height)};
    for (const double sigma : scales) {
        const auto k = derivative_kernels(sigma);
        const RealImage ixx = convolve_separable(base, k.g2, k.g0, k.radius);
        const RealImage iyy = convolve_separable(base, k.g0, k.g2, k.radius);
        const RealImage ixy = convolve_separable(base, k.g1, k.g1, k.radius);
        const double norm = sigma * sigma;
        for (std::size_t i = 0; i < base.values.size(); ++i) {
            const double a = norm * ixx.values[i];
            const double c = norm * iyy.values[i];
            const double b = norm * ixy.values[i];
            const double half_sum = 0.5 * (a + c);
            const double half_diff = 0.5 * (a - c);
            const double root = std::sqrt(half_diff * half_diff + b * b);
            const double l2 = half_sum + root;
            const double l1 = half_sum - root;
            if (!(l2 > 0.0)) continue;
            const double r = l2 * std::max(0.0, 1.0 - std::abs(l1) / l2);
            if (r <= map.response.values[i]) continue;
            map.response.values[i] = r;
            // Eigenvector of l2, canonical sign (nx > 0, or nx == 0 and ny > 0).
            double nx;
            double ny;
            if (std::abs(b) < 1e-12 * (std::abs(a) + std::abs(c) + 1e-300)) {
                nx = a >= c ? 1.0 : 0.0;
                ny = a >= c ? 0.0 : 1.0;
            } else if (a >= c) {
                nx = l2 - c;
                ny = b;
            } else {
                nx = b;
                ny = l2 - a;
            }
            const double len = std::hypot(nx, ny);
            nx /= len;
            ny /= len;
            if (nx < 0.0 || (nx == 0.0 && ny < 0.0)) {
                nx = -nx;
                ny = -ny;
            }
            map.normal_x.values[i] = nx;
            map.normal_y.values[i] = ny;
        }
    }
    return map;
}

BinaryMask nms_hysteresis(const VesselnessMap& map, double t_low, double t_high) {
    if (!(t_low >= 0.0) || !(t_low < t_high)) throw_invalid_argument("hysteresis needs 0 <= t_low < t_high");
    const RealImage& r = map.response;
    BinaryMask candidate(r.width, r.height);
    for (int y = 0; y < r.height; ++y) {
        for (int x = 0; x < r.width; ++x) {
            const double v = r.at(x, y);
            if (v <= 0.0 || v < t_low) continue;
            const double nx = map.normal_x.at(x, y);
            const double ny = map.normal_y.at(x, y);
            const double ahead = bilinear(r, x + nx, y + ny);
            const double behind = bilinear(r, x - nx, y - ny);
            if (v >= ahead && v > behind) candidate.set(x, y);
        }
    }
    BinaryMask out(r.width, r.height);
    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < r.height; ++y) {
        for (int x = 0; x < r.width; ++x) {
            if (candidate.get(x, y) && r.at(x, y) >= t_high) {
                out.set(x, y);
                queue.emplace_back(x, y);
            }
        }
    }
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        for (int k = 0; k < 8; ++k) {
            const int nx = x + kNx[k];
            const int ny = y + kNy[k];
            if (candidate.get(nx, ny) && !out.get(nx, ny)) {
                out.set(nx, ny);
                queue.emplace_back(nx, ny);
            }
        }
    }
    return out;
}

std::vector<int> VesselGraph::degrees() const {
    std::vector<int> deg(nodes.size(), 0);
    for (const auto& e : edges) {
        ++deg[e.node_a];
        ++deg[e.node_b];
    }
    return deg;
}

void VesselGraph::validate() const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id != static_cast<int>(i)) throw_invalid_argument("graph node ids must be dense");
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        if (e.id != static_cast<int>(i)) throw_invalid_argument("graph edge ids must be dense");
        if (e.node_a < 0 || e.node_b < 0 || e.node_a >= static_cast<int>(nodes.size()) ||
            e.node_b >= static_cast<int>(nodes.size())) {
            throw_invalid_argument("edge " + std::to_string(e.id) + " references a missing node");
        }
        if (distance(e.polyline.front(), nodes[e.node_a].pos) > 0.5 ||
            distance(e.polyline.back(), nodes[e.node_b].pos) > 0.5) {
            throw_invalid_argument("edge " + std::to_string(e.id) + " does not end at its nodes");
        }
    }
}

Point2 position_point(const VesselGraph& g, const GraphPosition& pos) {
    if (pos.edge_id < 0 || pos.edge_id >= static_cast<int>(g.edges.size())) {
        throw_invalid_argument("invalid edge id " + std::to_string(pos.edge_id));
    }
    return point_at(g.edges[pos.edge_id].polyline, pos.offset);
}

// ---------------------------------------------------------------------------
// Graph construction

namespace {

struct PixelIndex {
    int width;
    [[nodiscard]] int operator()(int x, int y) const { return y * width + x; }
};

std::vector<Point2> smooth_path(const std::vector<Point2>& path, int window) {
    if (window <= 1 || path.size() < 3) return path;
    const int half = window / 2;
    const int n = static_cast<int>(path.size());
    std::vector<Point2> out(path.size());
    out.front() = path.front();
    out.back() = path.back();
    for (int i = 1; i + 1 < n; ++i) {
        const int h = std::min({half, i, n - 1 - i});
        Point2 acc;
        for (int j = i - h; j <= i + h; ++j) acc = acc + path[j];
        out[i] = (1.0 / (2 * h + 1)) * acc;
    }
    return out;
}

struct RawEdge {
    int a;
    int b;
    std::vector<Point2> pts;  // pixel path including both node positions
};

struct WorkGraph {
    std::vector<Point2> pos;
    std::vector<bool> junction;
    std::vector<bool> alive;
    std::vector<RawEdge> edges;
    std::vector<bool> edge_alive;

    [[nodiscard]] std::vector<int> degree() const {
        std::vector<int> d(pos.size(), 0);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if (!edge_alive[e]) continue;
            ++d[edges[e].a];
            ++d[edges[e].b];
        }
        return d;
    }
};

double path_length(const std::vector<Point2>& pts) {
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
    return len;
}

void contract_short_edges(WorkGraph& w, double min_length) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t e = 0; e < w.edges.size(); ++e) {
            if (!w.edge_alive[e]) continue;
            auto& edge = w.edges[e];
            if (!w.junction[edge.a] || !w.junction[edge.b]) continue;
            if (path_length(edge.pts) >= min_length) continue;
            w.edge_alive[e] = false;
            changed = true;
            if (edge.a == edge.b) continue;
            const int keep = std::min(edge.a, edge.b);
            const int drop = std::max(edge.a, edge.b);
            const Point2 merged = 0.5 * (w.pos[keep] + w.pos[drop]);
            w.pos[keep] = merged;
            w.alive[drop] = false;
            for (std::size_t f = 0; f < w.edges.size(); ++f) {
                if (!w.edge_alive[f]) continue;
                auto& other = w.edges[f];
                if (other.a == drop) other.a = keep;
                if (other.b == drop) other.b = keep;
                if (other.a == keep) other.pts.front() = merged;
                if (other.b == keep) other.pts.back() = merged;
            }
        }
    }
}

// Removes degree-2 pass-through nodes by joining their two edges and drops
// isolated nodes and bare loops.
void normalize_nodes(WorkGraph& w) {
    bool changed = true;
    while (changed) {
        changed = false;
        const auto deg = w.degree();
        for (std::size_t v = 0; v < w.pos.size(); ++v) {
            if (!w.alive[v]) continue;
            if (deg[v] == 0) {
                w.alive[v] = false;
                continue;
            }
            if (deg[v] != 2) continue;
            std::vector<std::size_t> inc;
            for (std::size_t e = 0; e < w.edges.size(); ++e) {
                if (w.edge_alive[e] && (w.edges[e].a == static_cast<int>(v) || w.edges[e].b == static_cast<int>(v))) {
                    inc.push_back(e);
                }
            }
            if (inc.size() == 1) {
                // A bare loop through v: nothing else attaches, drop it.
                w.edge_alive[inc[0]] = false;
                w.alive[v] = false;
                changed = true;
                break;
            }
            auto& e1 = w.edges[inc[0]];
            auto& e2 = w.edges[inc[1]];
            // Orient e1 to end at v and e2 to start at v.
            if (e1.a == static_cast<int>(v)) {
                std::swap(e1.a, e1.b);
                std::reverse(e1.pts.begin(), e1.pts.end());
            }
            if (e2.b == static_cast<int>(v)) {
                std::swap(e2.a, e2.b);
                std::reverse(e2.pts.begin(), e2.pts.end());
            }
            e1.pts.insert(e1.pts.end(), e2.pts.begin() + 1, e2.pts.end());
            e1.b = e2.b;
            w.edge_alive[inc[1]] = false;
            w.alive[v] = false;
            changed = true;
            break;
        }
    }
    const auto deg = w.degree();
    for (std::size_t v = 0; v < w.pos.size(); ++v) {
        if (w.alive[v]) w.junction[v] = deg[v] >= 3;
    }
}

}  // namespace

VesselGraph build_graph(const BinaryMask& centerline, int phase, const GraphBuildConfig& cfg) {
    const int W = centerline.width;
    const int H = centerline.height;
    const PixelIndex idx{W};
    std::vector<int> nbr(static_cast<std::size_t>(W) * H, 0);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (!centerline.get(x, y)) continue;
            int c = 0;
            for (int k = 0; k < 8; ++k) c += centerline.get(x + kNx[k], y + kNy[k]) ? 1 : 0;
            nbr[idx(x, y)] = c;
        }
    }

    // Node id per node pixel: endpoints individually, junction pixels by
    // 8-connected cluster.
    WorkGraph w;
    std::vector<int> node_of(static_cast<std::size_t>(W) * H, -1);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (!centerline.get(x, y) || node_of[idx(x, y)] >= 0) continue;
            const int c = nbr[idx(x, y)];
            if (c == 1) {
                node_of[idx(x, y)] = static_cast<int>(w.pos.size());
                w.pos.push_back({static_cast<double>(x), static_cast<double>(y)});
                w.junction.push_back(false);
            } else if (c >= 3) {
                const int id = static_cast<int>(w.pos.size());
                Point2 acc;
                int count = 0;
                std::deque<std::pair<int, int>> queue{{x, y}};
                node_of[idx(x, y)] = id;
                while (!queue.empty()) {
                    const auto [cx, cy] = queue.front();
                    queue.pop_front();
                    acc = acc + Point2{static_cast<double>(cx), static_cast<double>(cy)};
                    ++count;
                    for (int k = 0; k < 8; ++k) {
                        const int nx = cx + kNx[k];
                        const int ny = cy + kNy[k];
                        if (centerline.get(nx, ny) && nbr[idx(nx, ny)] >= 3 && node_of[idx(nx, ny)] < 0) {
                            node_of[idx(nx, ny)] = id;
                            queue.emplace_back(nx, ny);
                        }
                    }
                }
                w.pos.push_back((1.0 / count) * acc);
                w.junction.push_back(true);
            }
        }
    }
    w.alive.assign(w.pos.size(), true);

    std::vector<std::uint8_t> visited(static_cast<std::size_t>(W) * H, 0);
    std::set<std::pair<int, int>> direct_links;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const int start = node_of[idx(x, y)];
            if (start < 0) continue;
            for (int k = 0; k < 8; ++k) {
                const int qx = x + kNx[k];
                const int qy = y + kNy[k];
                if (!centerline.get(qx, qy)) continue;
                const int q = idx(qx, qy);
                if (node_of[q] >= 0) {
                    if (node_of[q] != start) {
                        const auto key = std::minmax(start, node_of[q]);
                        if (direct_links.insert(key).second) {
                            w.edges.push_back({start, node_of[q], {w.pos[start], w.pos[node_of[q]]}});
                        }
                    }
                    continue;
                }
                if (visited[q]) continue;
                std::vector<Point2> path{w.pos[start]};
                int px = x;
                int py = y;
                int cx = qx;
                int cy = qy;
                int end = -1;
                while (true) {
                    visited[idx(cx, cy)] = 1;
                    path.push_back({static_cast<double>(cx), static_cast<double>(cy)});
                    int next_x = -1;
                    int next_y = -1;
                    for (int j = 0; j < 8; ++j) {
                        const int nx = cx + kNx[j];
                        const int ny = cy + kNy[j];
                        if (!centerline.get(nx, ny) || (nx == px && ny == py)) continue;
                        // Skip pixels of the node we just left.
                        if (node_of[idx(nx, ny)] == start && path.size() == 2) continue;
                        next_x = nx;
                        next_y = ny;
                        break;
                    }
                    if (next_x < 0) break;
                    const int n = idx(next_x, next_y);
                    if (node_of[n] >= 0) {
                        end = node_of[n];
                        break;
                    }
                    if (visited[n]) break;
                    px = cx;
                    py = cy;
                    cx = next_x;
                    cy = next_y;
                }
                if (end < 0) continue;
                path.push_back(w.pos[end]);
                w.edges.push_back({start, end, std::move(path)});
            }
        }
    }
    w.edge_alive.assign(w.edges.size(), true);

    contract_short_edges(w, cfg.contract_length);
    normalize_nodes(w);

    VesselGraph g;
    g.phase = phase;
    std::vector<int> remap(w.pos.size(), -1);
    for (std::size_t v = 0; v < w.pos.size(); ++v) {
        if (!w.alive[v]) continue;
        remap[v] = static_cast<int>(g.nodes.size());
        g.nodes.push_back(GraphNode{remap[v], w.pos[v], w.junction[v] ? NodeKind::Bifurcation : NodeKind::Endpoint});
    }
    for (std::size_t e = 0; e < w.edges.size(); ++e) {
        if (!w.edge_alive[e]) continue;
        const auto& raw = w.edges[e];
        std::vector<Point2> pts = smooth_path(raw.pts, cfg.smoothing_window);
        pts.front() = w.pos[raw.a];
        pts.back() = w.pos[raw.b];
        std::vector<Point2> dedup;
        for (const auto& p : pts) {
            if (dedup.empty() || distance(dedup.back(), p) > 1e-6) dedup.push_back(p);
        }
        if (dedup.size() < 2) continue;
        Polyline line(std::move(dedup));
        const double len = polyline_length(line);
        g.edges.push_back(GraphEdge{static_cast<int>(g.edges.size()), remap[raw.a], remap[raw.b], std::move(line), len});
    }
    return g;
}

// ---------------------------------------------------------------------------
// Geodesics

namespace {

std::vector<double> dijkstra_nodes(const VesselGraph& g, int source) {
    std::vector<std::vector<std::pair<int, double>>> adj(g.nodes.size());
    for (const auto& e : g.edges) {
        adj[e.node_a].emplace_back(e.node_b, e.length);
        adj[e.node_b].emplace_back(e.node_a, e.length);
    }
    std::vector<double> dist(g.nodes.size(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (const auto& [n, w] : adj[v]) {
            if (d + w < dist[n]) {
                dist[n] = d + w;
                heap.emplace(dist[n], n);
            }
        }
    }
    return dist;
}

void check_position(const VesselGraph& g, const GraphPosition& p) {
    if (p.edge_id < 0 || p.edge_id >= static_cast<int>(g.edges.size())) {
        throw_invalid_argument("invalid edge id " + std::to_string(p.edge_id));
    }
}

template <typename NodeDistance>
std::optional<double> geodesic_impl(const VesselGraph& g, const GraphPosition& a, const GraphPosition& b,
                                    NodeDistance&& node_distance) {
    check_position(g, a);
    check_position(g, b);
    const auto& ea = g.edges[a.edge_id];
    const auto& eb = g.edges[b.edge_id];
    const double oa = std::clamp(a.offset, 0.0, ea.length);
    const double ob = std::clamp(b.offset, 0.0, eb.length);
    double best = std::numeric_limits<double>::infinity();
    if (a.edge_id == b.edge_id) best = std::abs(oa - ob);
    const std::pair<int, double> a_ends[2] = {{ea.node_a, oa}, {ea.node_b, ea.length - oa}};
    const std::pair<int, double> b_ends[2] = {{eb.node_a, ob}, {eb.node_b, eb.length - ob}};
    for (const auto& [na, ca] : a_ends) {
        for (const auto& [nb, cb] : b_ends) {
            best = std::min(best, ca + node_distance(na, nb) + cb);
        }
    }
    if (!std::isfinite(best)) return std::nullopt;
    return best;
}

}  // namespace

std::optional<double> geodesic(const VesselGraph& g, const GraphPosition& a, const GraphPosition& b) {
    std::map<int, std::vector<double>> cache;
    return geodesic_impl(g, a, b, [&](int u, int v) {
        auto it = cache.find(u);
        if (it == cache.end()) it = cache.emplace(u, dijkstra_nodes(g, u)).first;
        return it->second[v];
    });
}

GeodesicIndex::GeodesicIndex(const VesselGraph& g) : graph_(&g), n_(g.nodes.size()) {
    dist_.resize(n_ * n_);
    for (std::size_t s = 0; s < n_; ++s) {
        const auto d = dijkstra_nodes(g, static_cast<int>(s));
        std::copy(d.begin(), d.end(), dist_.begin() + static_cast<std::ptrdiff_t>(s * n_));
    }
}

std::optional<double> GeodesicIndex::distance(const GraphPosition& a, const GraphPosition& b) const {
    return geodesic_impl(*graph_, a, b, [&](int u, int v) { return node_distance(u, v); });
}

// ---------------------------------------------------------------------------
// Extraction pipeline

void VesselExtractionConfig::validate() const {
    if (scales.empty()) throw_invalid_argument("vessel.scales must not be empty");
    for (const double s : scales) {
        if (!(s >= 0.5 && s <= 8.0)) throw_invalid_argument("vessel.scales entries must lie in [0.5, 8]");
    }
    if (!(high_percentile > 0.0 && high_percentile < 1.0)) {
        throw_invalid_argument("vessel.high_percentile must lie in (0, 1)");
    }
    if (!(low_ratio > 0.0 && low_ratio < 1.0)) throw_invalid_argument("vessel.low_ratio must lie in (0, 1)");
    if (t_high && t_low && !(*t_low < *t_high)) throw_invalid_argument("vessel.t_low must be below vessel.t_high");
    if (min_component < 0 || spur_length < 0 || gap_radius < 0.0) {
        throw_invalid_argument("vessel cleanup parameters must be non-negative");
    }
}

HysteresisThresholds resolve_thresholds(const VesselnessMap& map, const VesselExtractionConfig& cfg) {
    HysteresisThresholds t;
    if (cfg.t_high) {
        t.high = *cfg.t_high;
    } else {
        std::vector<double> nonzero;
        for (const double v : map.response.values) {
            if (v > 0.0) nonzero.push_back(v);
        }
        if (nonzero.empty()) {
            t.high = 1.0;
        } else {
            const auto k = static_cast<std::size_t>(cfg.high_percentile * static_cast<double>(nonzero.size() - 1));
            std::nth_element(nonzero.begin(), nonzero.begin() + static_cast<std::ptrdiff_t>(k), nonzero.end());
            t.high = nonzero[k];
        }
    }
    t.low = cfg.t_low ? *cfg.t_low : t.high * cfg.low_ratio;
    if (!(t.low < t.high)) t.low = 0.5 * t.high;
    return t;
}

namespace {

std::vector<std::vector<std::pair<int, int>>> components_8(const BinaryMask& m) {
    std::vector<std::vector<std::pair<int, int>>> comps;
    std::vector<std::uint8_t> seen(m.bits.size(), 0);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (!m.get(x, y) || seen[m.index(x, y)]) continue;
            comps.emplace_back();
            std::deque<std::pair<int, int>> queue{{x, y}};
            seen[m.index(x, y)] = 1;
            while (!queue.empty()) {
                const auto [cx, cy] = queue.front();
                queue.pop_front();
                comps.back().emplace_back(cx, cy);
                for (int k = 0; k < 8; ++k) {
                    const int nx = cx + kNx[k];
                    const int ny = cy + kNy[k];
                    if (m.get(nx, ny) && !seen[m.index(nx, ny)]) {
                        seen[m.index(nx, ny)] = 1;
                        queue.emplace_back(nx, ny);
                    }
                }
            }
        }
    }
    return comps;
}

void remove_small_components(BinaryMask& m, int min_size) {
    for (const auto& comp : components_8(m)) {
        if (static_cast<int>(comp.size()) >= min_size) continue;
        for (const auto& [x, y] : comp) m.set(x, y, false);
    }
}

int neighbor_count(const BinaryMask& m, int x, int y) {
    int c = 0;
    for (int k = 0; k < 8; ++k) c += m.get(x + kNx[k], y + kNy[k]) ? 1 : 0;
    return c;
}

void draw_line(BinaryMask& m, int x0, int y0, int x1, int y1) {
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        m.set(x0, y0);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

// Connects each end point to the nearest centerline pixel ahead of it that is
// not part of its own trailing branch.
void bridge_gaps(BinaryMask& m, double radius) {
    if (radius <= 0.0) return;
    const int r = static_cast<int>(std::ceil(radius));
    const int trail_depth = 2 * r + 2;
    std::vector<std::array<int, 4>> bridges;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (!m.get(x, y) || neighbor_count(m, x, y) != 1) continue;
            // Pixels within trail_depth steps along the skeleton from the end point.
            std::map<int, int> steps{{m.index(x, y), 0}};
            std::deque<std::pair<int, int>> queue{{x, y}};
            int tail_x = x;
            int tail_y = y;
            while (!queue.empty()) {
                const auto [cx, cy] = queue.front();
                queue.pop_front();
                const int s = steps[m.index(cx, cy)];
                if (s == 4) {
                    tail_x = cx;
                    tail_y = cy;
                }
                if (s >= trail_depth) continue;
                for (int k = 0; k < 8; ++k) {
                    const int nx = cx + kNx[k];
                    const int ny = cy + kNy[k];
                    if (m.get(nx, ny) && !steps.count(m.index(nx, ny))) {
                        steps[m.index(nx, ny)] = s + 1;
                        queue.emplace_back(nx, ny);
                    }
                }
            }
            const double ox = x - tail_x;
            const double oy = y - tail_y;
            const double olen = std::hypot(ox, oy);
            double best = std::numeric_limits<double>::infinity();
            int bx = -1;
            int by = -1;
            for (int yy = y - r; yy <= y + r; ++yy) {
                for (int xx = x - r; xx <= x + r; ++xx) {
                    if (!m.get(xx, yy) || steps.count(m.index(xx, yy))) continue;
                    const double d = std::hypot(xx - x, yy - y);
                    if (d > radius || d >= best) continue;
                    if (olen > 0.0 && ((xx - x) * ox + (yy - y) * oy) / (d * olen) < 0.3) continue;
                    best = d;
                    bx = xx;
                    by = yy;
                }
            }
            if (bx >= 0) bridges.push_back({x, y, bx, by});
        }
    }
    for (const auto& b : bridges) draw_line(m, b[0], b[1], b[2], b[3]);
}

// Removes terminal branches shorter than `min_len` pixels that end in a junction.
void prune_terminal_branches(BinaryMask& m, int min_len) {
    if (min_len <= 0) return;
    std::vector<std::pair<int, int>> doomed;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (!m.get(x, y) || neighbor_count(m, x, y) != 1) continue;
            std::vector<std::pair<int, int>> branch{{x, y}};
            int px = -1;
            int py = -1;
            int cx = x;
            int cy = y;
            bool junction = false;
            while (static_cast<int>(branch.size()) < min_len) {
                int next_x = -1;
                int next_y = -1;
                for (int k = 0; k < 8; ++k) {
                    const int nx = cx + kNx[k];
                    const int ny = cy + kNy[k];
                    if (!m.get(nx, ny) || (nx == px && ny == py)) continue;
                    if (std::find(branch.begin(), branch.end(), std::make_pair(nx, ny)) != branch.end()) continue;
                    next_x = nx;
                    next_y = ny;
                    break;
                }
                if (next_x < 0) break;
                const int c = neighbor_count(m, next_x, next_y);
                if (c >= 3) {
                    junction = true;
                    break;
                }
                if (c == 1) break;
                px = cx;
                py = cy;
                cx = next_x;
                cy = next_y;
                branch.emplace_back(cx, cy);
            }
            if (junction && static_cast<int>(branch.size()) < min_len) {
                doomed.insert(doomed.end(), branch.begin(), branch.end());
            }
        }
    }
    for (const auto& [x, y] : doomed) m.set(x, y, false);
}

}  // namespace

BinaryMask clean_centerline(const BinaryMask& raw, const VesselExtractionConfig& cfg) {
    BinaryMask m = thin(raw);
    remove_small_components(m, std::max(1, cfg.min_component / 2));
    bridge_gaps(m, cfg.gap_radius);
    m = thin(m);
    prune_terminal_branches(m, cfg.spur_length);
    m = thin(m);
    remove_small_components(m, cfg.min_component);
    return m;
}

VesselGraph extract_vessel_graph(const GrayImage& reference, int phase, const VesselExtractionConfig& cfg) {
    cfg.validate();
    const VesselnessMap map = vesselness(reference, cfg.scales);
    const HysteresisThresholds t = resolve_thresholds(map, cfg);
    const BinaryMask raw = nms_hysteresis(map, t.low, t.high);
    return build_graph(clean_centerline(raw, cfg), phase, cfg.graph);
}

}  // namespace voidd
