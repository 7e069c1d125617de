#include "voidd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "voidd/error.hpp"
#include "voidd/image_io.hpp"
#include "voidd/json_util.hpp"
#include "voidd/serialization.hpp"

namespace voidd {

using nlohmann::json;

namespace {

// Bit-reproducible draws: mt19937_64 output is fixed by the standard, the
// library distributions are not.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag) {
    return seed * 0x9E3779B97F4A7C15ULL + tag * 0xBF58476D1CE4E5B9ULL + 1;
}

Point2 bezier(const std::array<Point2, 4>& c, double t) {
    const double u = 1.0 - t;
    return (u * u * u) * c[0] + (3.0 * u * u * t) * c[1] + (3.0 * u * t * t) * c[2] + (t * t * t) * c[3];
}

std::array<Point2, 4> resolved_control(const SceneSpec& s, int b) {
    auto c = s.tree[b].control;
    if (s.tree[b].parent >= 0) c[0] = bezier(resolved_control(s, s.tree[b].parent), s.tree[b].attach_t);
    return c;
}

std::vector<Point2> bezier_samples(const std::array<Point2, 4>& c, double t_end) {
    constexpr int kSamples = 800;
    std::vector<Point2> pts;
    const int n = std::max(2, static_cast<int>(std::ceil(kSamples * t_end)));
    for (int i = 0; i <= n; ++i) pts.push_back(bezier(c, t_end * i / n));
    return pts;
}

Polyline unit_spaced(std::vector<Point2> pts) {
    Polyline line = Polyline::cleaned(std::move(pts));
    const auto n = static_cast<std::size_t>(std::ceil(polyline_length(line))) + 1;
    return resample(line, std::max<std::size_t>(n, 2));
}

Polyline curve_of(const std::array<Point2, 4>& c) { return unit_spaced(bezier_samples(c, 1.0)); }

std::vector<Point2> warp_all(const SceneSpec& s, int phase, std::span<const Point2> pts) {
    std::vector<Point2> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(warp_point(s, phase, p));
    return out;
}

// Darkness layer: max over objects of profile(distance to the object's curve).
class Canvas {
public:
    Canvas(int w, int h) : w_(w), h_(h), dark_(static_cast<std::size_t>(w) * h, 0.0), dist_(dark_.size()) {}

    template <typename Profile>
    void draw(std::span<const Point2> pts, double reach, Profile&& profile) {
        std::fill(dist_.begin(), dist_.end(), std::numeric_limits<double>::infinity());
        int x_lo = w_;
        int x_hi = -1;
        int y_lo = h_;
        int y_hi = -1;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const Point2 a = pts[i];
            const Point2 b = pts[i + 1];
            const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - reach)));
            const int x1 = std::min(w_ - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + reach)));
            const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - reach)));
            const int y1 = std::min(h_ - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + reach)));
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    const double d = point_segment_distance({static_cast<double>(x), static_cast<double>(y)}, a, b);
                    auto& slot = dist_[static_cast<std::size_t>(y) * w_ + x];
                    slot = std::min(slot, d);
                }
            }
            x_lo = std::min(x_lo, x0);
            x_hi = std::max(x_hi, x1);
            y_lo = std::min(y_lo, y0);
            y_hi = std::max(y_hi, y1);
        }
        for (int y = y_lo; y <= y_hi; ++y) {
            for (int x = x_lo; x <= x_hi; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w_ + x;
                if (dist_[i] <= reach) dark_[i] = std::max(dark_[i], profile(dist_[i]));
            }
        }
    }

    [[nodiscard]] double at(int x, int y) const { return dark_[static_cast<std::size_t>(y) * w_ + x]; }

private:
    int w_;
    int h_;
    std::vector<double> dark_;
    std::vector<double> dist_;
};

void draw_gaussian(Canvas& c, std::span<const Point2> pts, double sigma, double depth) {
    c.draw(pts, 4.0 * sigma + 1.0, [&](double d) { return depth * std::exp(-0.5 * d * d / (sigma * sigma)); });
}

void draw_distractor(Canvas& c, const SceneSpec& s, int phase, const DistractorSpec& d) {
    const Polyline line = curve_of(d.control);
    const auto pts = warp_all(s, phase, line.points());
    if (d.kind == DistractorKind::Catheter) {
        const double core = std::max(0.0, 0.5 * d.width - 1.0);
        c.draw(pts, core + 5.0, [&](double r) {
            if (r <= core) return d.depth;
            const double e = r - core;
            return d.depth * std::exp(-0.5 * e * e);
        });
    } else {
        draw_gaussian(c, pts, d.width / 2.5, d.depth);
    }
}

GrayImage finish(const SceneSpec& s, const Canvas& c, double noise_sigma, std::uint64_t tag) {
    NoiseSource noise(stream_seed(s.seed, tag));
    GrayImage img(s.width, s.height, 8);
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            const double bg = s.background + s.background_ripple * std::sin(x / 70.0) * std::cos(y / 95.0);
            const double v = bg - c.at(x, y) + noise_sigma * noise.gaussian();
            img.at(x, y) = static_cast<std::uint16_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return img;
}

std::vector<int> branch_chain(const SceneSpec& s, int leaf) {
    std::vector<int> chain;
    for (int b = leaf; b >= 0; b = s.tree[b].parent) chain.push_back(b);
    std::reverse(chain.begin(), chain.end());
    return chain;
}

}  // namespace

void SceneSpec::validate() const {
    if (width < 16 || height < 16) throw_invalid_argument("scene size must be at least 16x16");
    if (cycle_length < 2 || cycle_length > 64) throw_invalid_argument("cycle_length must lie in [2, 64]");
    if (n_navigation_frames < 0) throw_invalid_argument("n_navigation_frames must be non-negative");
    if (!(pixel_spacing_mm > 0.0)) throw_invalid_argument("pixel_spacing_mm must be positive");
    if (!(frame_interval_s > 0.0)) throw_invalid_argument("frame_interval_s must be positive");
    if (tree.empty()) throw_invalid_argument("vessel tree must have at least one branch");
    for (std::size_t b = 0; b < tree.size(); ++b) {
        if (tree[b].parent >= static_cast<int>(b) || tree[b].parent < -1) {
            throw_invalid_argument("branch " + std::to_string(b) + " must reference an earlier parent");
        }
        if (!(tree[b].attach_t >= 0.0 && tree[b].attach_t <= 1.0)) {
            throw_invalid_argument("branch " + std::to_string(b) + " attach_t must lie in [0, 1]");
        }
        if (!(tree[b].sigma > 0.0)) throw_invalid_argument("branch " + std::to_string(b) + " sigma must be positive");
    }
    if (guidewire.branch < 0 || guidewire.branch >= static_cast<int>(tree.size())) {
        throw_invalid_argument("navigated branch " + std::to_string(guidewire.branch) + " is not in the tree");
    }
    if (!(guidewire.tip_length_px > 0.0)) throw_invalid_argument("guidewire.tip_length_px must be positive");
    if (!(guidewire.speed_px_per_frame >= 0.0)) throw_invalid_argument("guidewire.speed_px_per_frame must be >= 0");
    if (!(guidewire.sigma > 0.0)) throw_invalid_argument("guidewire.sigma must be positive");
    if (!(dropout_fraction >= 0.0 && dropout_fraction <= 1.0)) {
        throw_invalid_argument("dropout_fraction must lie in [0, 1]");
    }
    if (!(noise_sigma >= 0.0) || !(reference_noise_sigma >= 0.0)) throw_invalid_argument("noise must be >= 0");
}

SceneSpec default_scene() {
    SceneSpec s;
    // 0: proximal trunk, ends in the bifurcation the guidewire crosses.
    s.tree.push_back({-1, 1.0, {{{70, 60}, {110, 100}, {150, 150}, {180, 205}}}, 3.0, 70.0});
    // 1: navigated continuation.
    s.tree.push_back({0, 1.0, {{{0, 0}, {195, 255}, {240, 310}, {285, 390}}}, 2.6, 68.0});
    // 2: the other arm of that bifurcation.
    s.tree.push_back({0, 1.0, {{{0, 0}, {235, 220}, {295, 215}, {360, 180}}}, 2.6, 68.0});
    // 3: side branch off the trunk.
    s.tree.push_back({0, 0.45, {{{0, 0}, {95, 165}, {80, 230}, {70, 300}}}, 2.0, 62.0});
    // 4: side branch off the navigated branch.
    s.tree.push_back({1, 0.55, {{{0, 0}, {280, 330}, {330, 355}, {380, 360}}}, 2.0, 62.0});
    // 5: side branch off the other arm.
    s.tree.push_back({2, 0.5, {{{0, 0}, {280, 170}, {275, 120}, {290, 75}}}, 1.8, 60.0});
    s.distractors.push_back(
        {DistractorKind::Catheter, {{{440, 505}, {452, 450}, {470, 400}, {500, 345}}}, 14.0, 40.0});
    s.dropout_fraction = 0.05;
    return s;
}

SceneSpec tip_free_scene() {
    SceneSpec s = default_scene();
    s.guidewire.present = false;
    s.dropout_fraction = 0.0;
    return s;
}

Point2 warp_point(const SceneSpec& s, int phase, Point2 p) {
    const double theta = 2.0 * std::numbers::pi * phase / s.cycle_length;
    const double wave = std::sin(theta);
    const Point2 center{0.5 * (s.width - 1), 0.5 * (s.height - 1)};
    const double rot = s.motion.rotation_deg * std::numbers::pi / 180.0 * wave;
    const double scale = 1.0 + s.motion.scale * wave;
    const Point2 v = p - center;
    Point2 w{scale * (std::cos(rot) * v.x - std::sin(rot) * v.y), scale * (std::sin(rot) * v.x + std::cos(rot) * v.y)};
    const double half = 0.5 * std::max(s.width, s.height);
    const double r = norm(w) / half;
    w = (1.0 + s.motion.radial_px * wave * r / half) * w;
    const Point2 shift{s.motion.translation_px * wave,
                       0.6 * s.motion.translation_px * (std::sin(theta + 0.9) - std::sin(0.9))};
    return center + w + shift;
}

Polyline navigated_path(const SceneSpec& s) {
    s.validate();
    const auto chain = branch_chain(s, s.guidewire.branch);
    std::vector<Point2> pts;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        const double t_end = k + 1 < chain.size() ? s.tree[chain[k + 1]].attach_t : 1.0;
        const auto part = bezier_samples(resolved_control(s, chain[k]), t_end);
        pts.insert(pts.end(), part.begin(), part.end());
    }
    return unit_spaced(std::move(pts));
}

SceneRender render_scene(const SceneSpec& s) {
    s.validate();
    std::vector<Polyline> branches;
    for (std::size_t b = 0; b < s.tree.size(); ++b) branches.push_back(curve_of(resolved_control(s, static_cast<int>(b))));
    const Polyline path = navigated_path(s);
    const double path_len = polyline_length(path);

    SceneRender out{{}, {}, {}, {}, {}, GroundTruth{path, {}, {}, s.pixel_spacing_mm}};
    for (int p = 0; p < s.cycle_length; ++p) {
        Canvas canvas(s.width, s.height);
        for (std::size_t b = 0; b < branches.size(); ++b) {
            draw_gaussian(canvas, warp_all(s, p, branches[b].points()), s.tree[b].sigma, s.tree[b].depth);
        }
        out.reference.push_back(finish(s, canvas, s.reference_noise_sigma, 1 + static_cast<std::uint64_t>(p)));
        out.ground_truth.voi_by_phase.emplace(p, Polyline::cleaned(warp_all(s, p, path.points())));
    }

    const int n = s.n_navigation_frames;
    out.dropped.assign(n, false);
    if (s.guidewire.present && n > 0 && s.dropout_fraction > 0.0) {
        NoiseSource pick(stream_seed(s.seed, 0));
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(pick.uniform() * (i + 1));
            std::swap(order[i], order[std::min(j, i)]);
        }
        const int k = static_cast<int>(std::lround(s.dropout_fraction * n));
        for (int i = 0; i < k; ++i) out.dropped[order[i]] = true;
    }

    const double tip_len = std::min(s.guidewire.tip_length_px, path_len);
    const double start = s.guidewire.start_px.value_or(tip_len);
    for (int i = 0; i < n; ++i) {
        const int phase = i % s.cycle_length;
        Canvas canvas(s.width, s.height);
        for (const auto& d : s.distractors) draw_distractor(canvas, s, phase, d);
        std::optional<Polyline> tip;
        if (s.guidewire.present) {
            const double lead = std::clamp(start + s.guidewire.speed_px_per_frame * i, tip_len, path_len);
            tip = Polyline::cleaned(warp_all(s, phase, sub_polyline(path, lead - tip_len, lead)));
            if (out.dropped[i]) {
                const double blur = std::hypot(s.guidewire.sigma, 10.0);
                draw_gaussian(canvas, tip->points(), blur, s.guidewire.depth * s.guidewire.sigma / blur);
            } else {
                draw_gaussian(canvas, tip->points(), s.guidewire.sigma, s.guidewire.depth);
            }
        }
        out.navigation.push_back(finish(s, canvas, s.noise_sigma, 10000 + static_cast<std::uint64_t>(i)));
        out.navigation_phase.push_back(phase);
        out.true_tips.push_back(std::move(tip));
        out.ground_truth.tip_present.push_back(s.guidewire.present);
    }
    return out;
}

SynthOutput generate(const SceneSpec& s, const std::filesystem::path& out_dir) {
    const SceneRender r = render_scene(s);
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "reference", ec);
    std::filesystem::create_directories(out_dir / "navigation", ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + out_dir.string() + ": " + ec.message());

    SequenceManifest m;
    m.pixel_spacing_mm = s.pixel_spacing_mm;
    m.frame_interval_s = s.frame_interval_s;
    m.cycle_length = s.cycle_length;
    char name[64];
    for (int p = 0; p < s.cycle_length; ++p) {
        std::snprintf(name, sizeof name, "reference/ref_%02d.pgm", p);
        write_pgm(r.reference[p], out_dir / name);
        m.reference_frames.push_back({name, p});
    }
    for (std::size_t i = 0; i < r.navigation.size(); ++i) {
        std::snprintf(name, sizeof name, "navigation/nav_%03zu.pgm", i);
        write_pgm(r.navigation[i], out_dir / name);
        m.navigation_frames.push_back({name, r.navigation_phase[i]});
    }
    m.ground_truth = GroundTruthRef{"ground_truth.json", r.ground_truth.tip_present};
    m.base_dir = out_dir;

    json gt = ground_truth_to_json(r.ground_truth);
    json tips = json::array();
    for (const auto& t : r.true_tips) tips.push_back(t ? points_to_json(t->points()) : json(nullptr));
    gt["tips"] = std::move(tips);
    detail::write_json_file(gt, out_dir / "ground_truth.json");
    write_manifest(m, out_dir / "manifest.json");
    return {m, r.ground_truth, out_dir / "manifest.json"};
}

// ---------------------------------------------------------------------------
// Scene JSON

namespace {

json control_to_json(const std::array<Point2, 4>& c) { return points_to_json(c); }

std::array<Point2, 4> control_from_json(const json& j, const std::string& field) {
    const auto pts = points_from_json(j, field);
    if (pts.size() != 4) throw_validation(field, "expected 4 control points");
    return {pts[0], pts[1], pts[2], pts[3]};
}

}  // namespace

json scene_to_json(const SceneSpec& s) {
    json tree = json::array();
    for (const auto& b : s.tree) {
        tree.push_back({{"parent", b.parent},
                        {"attach_t", b.attach_t},
                        {"control", control_to_json(b.control)},
                        {"sigma", b.sigma},
                        {"depth", b.depth}});
    }
    json distractors = json::array();
    for (const auto& d : s.distractors) {
        distractors.push_back({{"kind", d.kind == DistractorKind::Catheter ? "catheter" : "lead"},
                               {"control", control_to_json(d.control)},
                               {"width", d.width},
                               {"depth", d.depth}});
    }
    const auto& g = s.guidewire;
    return json{{"width", s.width},
                {"height", s.height},
                {"cycle_length", s.cycle_length},
                {"n_navigation_frames", s.n_navigation_frames},
                {"pixel_spacing_mm", s.pixel_spacing_mm},
                {"frame_interval_s", s.frame_interval_s},
                {"background", s.background},
                {"background_ripple", s.background_ripple},
                {"tree", std::move(tree)},
                {"guidewire",
                 {{"present", g.present},
                  {"branch", g.branch},
                  {"tip_length_px", g.tip_length_px},
                  {"speed_px_per_frame", g.speed_px_per_frame},
                  {"start_px", g.start_px ? json(*g.start_px) : json(nullptr)},
                  {"sigma", g.sigma},
                  {"depth", g.depth}}},
                {"motion",
                 {{"translation_px", s.motion.translation_px},
                  {"rotation_deg", s.motion.rotation_deg},
                  {"scale", s.motion.scale},
                  {"radial_px", s.motion.radial_px}}},
                {"noise_sigma", s.noise_sigma},
                {"reference_noise_sigma", s.reference_noise_sigma},
                {"distractors", std::move(distractors)},
                {"dropout_fraction", s.dropout_fraction},
                {"seed", s.seed}};
}

SceneSpec scene_from_json(const json& j) {
    using detail::reject_unknown_keys;
    using detail::require;
    using detail::value_or;
    reject_unknown_keys(j,
                        {"width", "height", "cycle_length", "n_navigation_frames", "pixel_spacing_mm",
                         "frame_interval_s", "background", "background_ripple", "tree", "guidewire", "motion",
                         "noise_sigma", "reference_noise_sigma", "distractors", "dropout_fraction", "seed"},
                        "");
    SceneSpec s = default_scene();
    s.width = value_or(j, "width", s.width);
    s.height = value_or(j, "height", s.height);
    s.cycle_length = value_or(j, "cycle_length", s.cycle_length);
    s.n_navigation_frames = value_or(j, "n_navigation_frames", s.n_navigation_frames);
    s.pixel_spacing_mm = value_or(j, "pixel_spacing_mm", s.pixel_spacing_mm);
    s.frame_interval_s = value_or(j, "frame_interval_s", s.frame_interval_s);
    s.background = value_or(j, "background", s.background);
    s.background_ripple = value_or(j, "background_ripple", s.background_ripple);
    s.noise_sigma = value_or(j, "noise_sigma", s.noise_sigma);
    s.reference_noise_sigma = value_or(j, "reference_noise_sigma", s.reference_noise_sigma);
    s.dropout_fraction = value_or(j, "dropout_fraction", s.dropout_fraction);
    s.seed = value_or(j, "seed", s.seed);
    if (j.contains("tree")) {
        const auto& arr = j.at("tree");
        if (!arr.is_array()) throw_validation("tree", "expected an array");
        s.tree.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string prefix = "tree[" + std::to_string(i) + "]";
            reject_unknown_keys(arr[i], {"parent", "attach_t", "control", "sigma", "depth"}, prefix);
            BranchSpec b;
            b.parent = value_or(arr[i], "parent", b.parent, prefix);
            b.attach_t = value_or(arr[i], "attach_t", b.attach_t, prefix);
            b.control = control_from_json(require<json>(arr[i], "control", prefix), prefix + ".control");
            b.sigma = value_or(arr[i], "sigma", b.sigma, prefix);
            b.depth = value_or(arr[i], "depth", b.depth, prefix);
            s.tree.push_back(b);
        }
    }
    if (j.contains("guidewire")) {
        const auto& o = j.at("guidewire");
        reject_unknown_keys(o, {"present", "branch", "tip_length_px", "speed_px_per_frame", "start_px", "sigma", "depth"},
                            "guidewire");
        auto& g = s.guidewire;
        g.present = value_or(o, "present", g.present, "guidewire");
        g.branch = value_or(o, "branch", g.branch, "guidewire");
        g.tip_length_px = value_or(o, "tip_length_px", g.tip_length_px, "guidewire");
        g.speed_px_per_frame = value_or(o, "speed_px_per_frame", g.speed_px_per_frame, "guidewire");
        if (o.contains("start_px") && !o.at("start_px").is_null()) {
            g.start_px = require<double>(o, "start_px", "guidewire");
        }
        g.sigma = value_or(o, "sigma", g.sigma, "guidewire");
        g.depth = value_or(o, "depth", g.depth, "guidewire");
    }
    if (j.contains("motion")) {
        const auto& o = j.at("motion");
        reject_unknown_keys(o, {"translation_px", "rotation_deg", "scale", "radial_px"}, "motion");
        s.motion.translation_px = value_or(o, "translation_px", s.motion.translation_px, "motion");
        s.motion.rotation_deg = value_or(o, "rotation_deg", s.motion.rotation_deg, "motion");
        s.motion.scale = value_or(o, "scale", s.motion.scale, "motion");
        s.motion.radial_px = value_or(o, "radial_px", s.motion.radial_px, "motion");
    }
    if (j.contains("distractors")) {
        const auto& arr = j.at("distractors");
        if (!arr.is_array()) throw_validation("distractors", "expected an array");
        s.distractors.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string prefix = "distractors[" + std::to_string(i) + "]";
            reject_unknown_keys(arr[i], {"kind", "control", "width", "depth"}, prefix);
            DistractorSpec d;
            const auto kind = value_or<std::string>(arr[i], "kind", "catheter", prefix);
            if (kind == "catheter") {
                d.kind = DistractorKind::Catheter;
            } else if (kind == "lead") {
                d.kind = DistractorKind::Lead;
            } else {
                throw_validation(prefix + ".kind", "expected catheter or lead");
            }
            d.control = control_from_json(require<json>(arr[i], "control", prefix), prefix + ".control");
            d.width = value_or(arr[i], "width", d.width, prefix);
            d.depth = value_or(arr[i], "depth", d.depth, prefix);
            s.distractors.push_back(d);
        }
    }
    try {
        s.validate();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidArgument) throw;
        throw_validation("scene", e.detail());
    }
    return s;
}

}  // namespace voidd
