#pragma once

// Brute-force reference implementations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "voidd/geometry.hpp"
#include "voidd/image.hpp"
#include "voidd/min_tree.hpp"

namespace voidd::oracle {

// ---------------------------------------------------------------------------
// Min tree on images of at most 64 pixels: every component is a bit set.

using PixelSet = std::uint64_t;

inline std::vector<PixelSet> level_components(const GrayImage& img, int level, bool eight) {
    const int w = img.width;
    const int h = img.height;
    std::vector<PixelSet> out;
    PixelSet seen = 0;
    for (int start = 0; start < w * h; ++start) {
        if ((seen >> start) & 1u) continue;
        if (img.pixels[start] > level) continue;
        PixelSet comp = 0;
        std::deque<int> queue{start};
        seen |= PixelSet{1} << start;
        while (!queue.empty()) {
            const int i = queue.front();
            queue.pop_front();
            comp |= PixelSet{1} << i;
            const int x = i % w;
            const int y = i / w;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    if (!eight && dx != 0 && dy != 0) continue;
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const int j = ny * w + nx;
                    if (((seen >> j) & 1u) || img.pixels[j] > level) continue;
                    seen |= PixelSet{1} << j;
                    queue.push_back(j);
                }
            }
        }
        out.push_back(comp);
    }
    return out;
}

struct LevelSetTree {
    std::map<PixelSet, int> level;      // component -> lowest level at which it exists
    std::map<PixelSet, PixelSet> parent;  // smallest strict superset; root maps to itself
};

inline LevelSetTree level_set_tree(const GrayImage& img, bool eight) {
    LevelSetTree t;
    const int top = *std::max_element(img.pixels.begin(), img.pixels.end());
    for (int lvl = 0; lvl <= top; ++lvl) {
        for (const PixelSet c : level_components(img, lvl, eight)) t.level.emplace(c, lvl);
    }
    for (const auto& [c, lvl] : t.level) {
        PixelSet best = c;
        int best_size = std::numeric_limits<int>::max();
        for (const auto& [d, dl] : t.level) {
            if (d == c || (d & c) != c) continue;
            const int size = __builtin_popcountll(d);
            if (size < best_size) {
                best_size = size;
                best = d;
            }
        }
        t.parent.emplace(c, best);
    }
    return t;
}

inline PixelSet to_set(const BinaryMask& m) {
    PixelSet s = 0;
    for (std::size_t i = 0; i < m.bits.size(); ++i) {
        if (m.bits[i]) s |= PixelSet{1} << i;
    }
    return s;
}

/// Empty string when the tree matches the brute-force level-set tree.
inline std::string compare_min_tree(const MinTree& tree, const GrayImage& img, bool eight) {
    const LevelSetTree ref = level_set_tree(img, eight);
    if (tree.node_count() != ref.level.size()) {
        return "node count " + std::to_string(tree.node_count()) + " vs " + std::to_string(ref.level.size());
    }
    std::vector<PixelSet> sets(tree.node_count());
    for (std::size_t n = 0; n < tree.node_count(); ++n) {
        sets[n] = to_set(tree.component_mask(static_cast<MinTree::NodeId>(n)));
    }
    for (std::size_t n = 0; n < tree.node_count(); ++n) {
        const auto it = ref.level.find(sets[n]);
        if (it == ref.level.end()) return "node " + std::to_string(n) + " is not a level-set component";
        if (it->second != tree.level(static_cast<MinTree::NodeId>(n))) return "level mismatch at node " + std::to_string(n);
        const PixelSet expected_parent = ref.parent.at(sets[n]);
        if (sets[tree.parent(static_cast<MinTree::NodeId>(n))] != expected_parent) {
            return "parent mismatch at node " + std::to_string(n);
        }
        if (tree.area(static_cast<MinTree::NodeId>(n)) != __builtin_popcountll(sets[n])) {
            return "area mismatch at node " + std::to_string(n);
        }
    }
    return {};
}

inline GrayImage random_image(std::mt19937_64& rng, int w, int h, int levels) {
    GrayImage img(w, h);
    std::uniform_int_distribution<int> pick(0, levels - 1);
    for (auto& p : img.pixels) p = static_cast<std::uint16_t>(pick(rng));
    return img;
}

// ---------------------------------------------------------------------------
// Discrete Frechet by enumerating every monotone coupling.

inline void couplings(const std::vector<Point2>& p, const std::vector<Point2>& q, std::size_t i, std::size_t j,
                      double running, double& best) {
    running = std::max(running, distance(p[i], q[j]));
    if (running >= best) return;
    if (i + 1 == p.size() && j + 1 == q.size()) {
        best = running;
        return;
    }
    if (i + 1 < p.size()) couplings(p, q, i + 1, j, running, best);
    if (j + 1 < q.size()) couplings(p, q, i, j + 1, running, best);
    if (i + 1 < p.size() && j + 1 < q.size()) couplings(p, q, i + 1, j + 1, running, best);
}

inline double exhaustive_frechet(const std::vector<Point2>& p, const std::vector<Point2>& q) {
    double best = std::numeric_limits<double>::infinity();
    couplings(p, q, 0, 0, 0.0, best);
    return best;
}

inline std::vector<Point2> random_curve(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    std::vector<Point2> pts;
    while (pts.size() < n) {
        const Point2 p{coord(rng), coord(rng)};
        if (pts.empty() || distance(pts.back(), p) > 1e-6) pts.push_back(p);
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Elongation from an explicit pixel list.

inline double covariance_elongation(const std::vector<std::pair<int, int>>& pixels) {
    const double n = static_cast<double>(pixels.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : pixels) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double cxx = 0.0;
    double cyy = 0.0;
    double cxy = 0.0;
    for (const auto& [x, y] : pixels) {
        cxx += (x - mx) * (x - mx);
        cyy += (y - my) * (y - my);
        cxy += (x - mx) * (y - my);
    }
    cxx /= n;
    cyy /= n;
    cxy /= n;
    const double lambda1 = 0.5 * (cxx + cyy) + std::sqrt(0.25 * (cxx - cyy) * (cxx - cyy) + cxy * cxy);
    const double l_max = 2.0 * std::sqrt(lambda1);
    return M_PI * l_max * l_max / n;
}

// ---------------------------------------------------------------------------
// Binary topology: 8-connected foreground components and 4-connected holes.

inline int count_components(const BinaryMask& m, bool value, bool eight, bool skip_border_touching) {
    std::vector<std::uint8_t> seen(m.bits.size(), 0);
    int count = 0;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            const std::size_t i = m.index(x, y);
            if (seen[i] || (m.bits[i] != 0) != value) continue;
            bool touches = false;
            std::deque<std::pair<int, int>> queue{{x, y}};
            seen[i] = 1;
            while (!queue.empty()) {
                const auto [cx, cy] = queue.front();
                queue.pop_front();
                if (cx == 0 || cy == 0 || cx == m.width - 1 || cy == m.height - 1) touches = true;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if ((dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0)) continue;
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (!m.inside(nx, ny)) continue;
                        const std::size_t j = m.index(nx, ny);
                        if (seen[j] || (m.bits[j] != 0) != value) continue;
                        seen[j] = 1;
                        queue.emplace_back(nx, ny);
                    }
                }
            }
            if (!(skip_border_touching && touches)) ++count;
        }
    }
    return count;
}

inline int foreground_components(const BinaryMask& m) { return count_components(m, true, true, false); }
inline int holes(const BinaryMask& m) { return count_components(m, false, false, true); }

/// Union of random disks and rectangles inside a one-pixel empty frame.
inline BinaryMask random_blob(std::mt19937_64& rng, int size) {
    BinaryMask m(size, size);
    std::uniform_int_distribution<int> shapes(1, 5);
    std::uniform_int_distribution<int> centre(3, size - 4);
    std::uniform_int_distribution<int> extent(2, size / 4);
    const int n = shapes(rng);
    for (int s = 0; s < n; ++s) {
        const int cx = centre(rng);
        const int cy = centre(rng);
        const int r = extent(rng);
        const bool disk = rng() % 2 == 0;
        const int r2 = extent(rng);
        for (int y = 1; y < size - 1; ++y) {
            for (int x = 1; x < size - 1; ++x) {
                const bool in = disk ? (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r
                                     : std::abs(x - cx) <= r && std::abs(y - cy) <= r2;
                if (in) m.set(x, y);
            }
        }
    }
    // Punch a few holes.
    std::uniform_int_distribution<int> holes_n(0, 3);
    const int punch = holes_n(rng);
    for (int k = 0; k < punch; ++k) {
        const int cx = centre(rng);
        const int cy = centre(rng);
        const int r = 1 + static_cast<int>(rng() % 3);
        for (int y = cy - r; y <= cy + r; ++y) {
            for (int x = cx - r; x <= cx + r; ++x) {
                if (m.inside(x, y)) m.set(x, y, false);
            }
        }
    }
    return m;
}

}  // namespace voidd::oracle
