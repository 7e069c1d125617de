#include "voidd/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "voidd/error.hpp"
#include "voidd/image_io.hpp"
#include "voidd/json_util.hpp"
#include "voidd/serialization.hpp"

namespace voidd {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr first_error;
    std::size_t first_index = n;
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < first_index) {
                    first_index = i;
                    first_error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<VesselGraph> extract_vessels(const SequenceManifest& m, const PipelineConfig& cfg, int jobs) {
    std::vector<std::optional<VesselGraph>> slots(m.cycle_length);
    parallel_for(static_cast<std::size_t>(m.cycle_length), jobs, [&](std::size_t p) {
        const int phase = static_cast<int>(p);
        const GrayImage ref = read_pgm(m.resolve(m.reference_for_phase(phase).path));
        slots[p] = extract_vessel_graph(ref, phase, cfg.vessel);
    });
    std::vector<VesselGraph> graphs;
    for (auto& s : slots) graphs.push_back(std::move(*s));
    return graphs;
}

std::vector<std::vector<TipCandidate>> extract_tips(const SequenceManifest& m, const PipelineConfig& cfg, int jobs,
                                                    std::vector<double>* seconds) {
    const std::size_t n = m.navigation_frames.size();
    std::vector<std::vector<TipCandidate>> tips(n);
    std::vector<double> timing(n, 0.0);
    parallel_for(n, jobs, [&](std::size_t i) {
        const GrayImage frame = read_pgm(m.resolve(m.navigation_frames[i].path));
        const auto t0 = Clock::now();
        tips[i] = extract_tip_candidates(frame, cfg.tip, static_cast<int>(i));
        timing[i] = seconds_since(t0);
    });
    if (seconds) *seconds = std::move(timing);
    return tips;
}

std::vector<FramePairs> match_frames(const SequenceManifest& m, const std::vector<std::vector<TipCandidate>>& tips,
                                     const std::vector<VesselGraph>& graphs, const PipelineConfig& cfg, int jobs,
                                     std::vector<double>* seconds) {
    const std::size_t n = m.navigation_frames.size();
    if (tips.size() != n) {
        throw_validation("tips", "expected " + std::to_string(n) + " frames, got " + std::to_string(tips.size()));
    }
    std::map<int, const VesselGraph*> by_phase;
    for (const auto& g : graphs) by_phase[g.phase] = &g;
    std::vector<FramePairs> out(n);
    std::vector<double> timing(n, 0.0);
    parallel_for(n, jobs, [&](std::size_t i) {
        const int phase = m.navigation_frames[i].phase;
        const auto it = by_phase.find(phase);
        if (it == by_phase.end()) throw_validation("graphs", "no vessel graph for phase " + std::to_string(phase));
        const auto t0 = Clock::now();
        out[i] = FramePairs{static_cast<int>(i), phase, extract_feature_pairs(tips[i], *it->second, cfg.matching)};
        timing[i] = seconds_since(t0);
    });
    if (seconds) *seconds = std::move(timing);
    return out;
}

TrackingOutput track_sequence(const SequenceManifest& m, const std::vector<std::vector<TipCandidate>>& tips,
                              const std::vector<VesselGraph>& graphs, const PipelineConfig& cfg, int jobs) {
    TrackingOutput out{{}, {}, 0.0, 0.0};
    std::vector<double> per_frame;
    out.pairs = match_frames(m, tips, graphs, cfg, jobs, &per_frame);
    for (const double s : per_frame) out.matching_seconds += s;
    const auto t0 = Clock::now();
    const GraphSet set(graphs);
    out.result = run_voidd(out.pairs, set, cfg.tracker, m.frame_interval_s);
    out.assignment_seconds = seconds_since(t0);
    return out;
}

json result_to_json(const VoiddResult& r, const SequenceManifest& m, const PipelineConfig& cfg) {
    json frames = json::array();
    json track_id = nullptr;
    if (const Track* v = r.vessel()) {
        track_id = v->id;
        for (const auto& e : v->entries) {
            frames.push_back({{"frame", e.frame},
                              {"phase", e.phase},
                              {"score", e.pair.score},
                              {"tip_points", points_to_json(e.pair.tip.curve.points())},
                              {"voi_points", points_to_json(e.pair.voi.polyline.points())}});
        }
    }
    json summary = json::array();
    for (const auto& t : r.tracks) {
        summary.push_back({{"id", t.id},
                           {"entries", t.entries.size()},
                           {"first_frame", t.entries.front().frame},
                           {"last_frame", t.entries.back().frame}});
    }
    json phases = json::array();
    for (const auto& f : m.navigation_frames) phases.push_back(f.phase);
    return json{{"frame_count", m.navigation_frames.size()},
                {"phases", std::move(phases)},
                {"vessel", {{"track_id", track_id}, {"frames", std::move(frames)}}},
                {"tracks_summary", std::move(summary)},
                {"config_echo", config_to_json(cfg)}};
}

DetectionSequence detections_from_result_json(const json& j) {
    using detail::require;
    DetectionSequence d;
    d.frame_count = require<int>(j, "frame_count");
    d.phases = require<std::vector<int>>(j, "phases");
    if (static_cast<int>(d.phases.size()) != d.frame_count) throw_validation("phases", "one phase per frame required");
    const json vessel = require<json>(j, "vessel");
    const json frames = require<json>(vessel, "frames", "vessel");
    if (!frames.is_array()) throw_validation("vessel.frames", "expected an array");
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const std::string prefix = "vessel.frames[" + std::to_string(i) + "]";
        const int frame = require<int>(frames[i], "frame", prefix);
        auto pts = points_from_json(require<json>(frames[i], "voi_points", prefix), prefix + ".voi_points");
        try {
            d.voi.emplace(frame, Polyline(std::move(pts)));
        } catch (const Error& e) {
            throw_validation(prefix + ".voi_points", e.detail());
        }
    }
    return d;
}

DetectionSequence detections_from_result(const VoiddResult& r, const SequenceManifest& m) {
    DetectionSequence d;
    d.frame_count = static_cast<int>(m.navigation_frames.size());
    for (const auto& f : m.navigation_frames) d.phases.push_back(f.phase);
    for (const auto& [frame, pair] : r.per_frame_detection) d.voi.emplace(frame, pair.voi.polyline);
    return d;
}

GroundTruth manifest_ground_truth(const SequenceManifest& m) {
    if (!m.ground_truth) throw_validation("ground_truth", "manifest has no ground truth");
    GroundTruth gt = read_ground_truth(m.resolve(m.ground_truth->voi_path));
    if (gt.tip_present != m.ground_truth->tip_presence) {
        throw_validation("ground_truth.tip_presence", "disagrees with " + m.ground_truth->voi_path);
    }
    return gt;
}

std::filesystem::path graph_file(const std::filesystem::path& dir, int phase) {
    char name[32];
    std::snprintf(name, sizeof name, "graph_%02d.json", phase);
    return dir / name;
}

std::filesystem::path tips_file(const std::filesystem::path& dir, int frame) {
    char name[32];
    std::snprintf(name, sizeof name, "tips_%03d.json", frame);
    return dir / name;
}

namespace {

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

template <typename Parse>
auto read_stage_file(const std::filesystem::path& path, Parse&& parse) {
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::Io, "missing file " + path.string());
    const json j = detail::read_json_file(path);
    try {
        return parse(j);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

}  // namespace

void write_graphs(const std::vector<VesselGraph>& graphs, const std::filesystem::path& dir) {
    ensure_dir(dir);
    for (const auto& g : graphs) detail::write_json_file(graph_to_json(g), graph_file(dir, g.phase));
}

std::vector<VesselGraph> read_graphs(const std::filesystem::path& dir, int cycle_length) {
    std::vector<VesselGraph> graphs;
    for (int p = 0; p < cycle_length; ++p) {
        VesselGraph g = read_stage_file(graph_file(dir, p), graph_from_json);
        if (g.phase != p) throw_validation(graph_file(dir, p).string() + ": phase", "expected " + std::to_string(p));
        graphs.push_back(std::move(g));
    }
    return graphs;
}

void write_tips(const std::vector<std::vector<TipCandidate>>& tips, const std::filesystem::path& dir) {
    ensure_dir(dir);
    for (std::size_t i = 0; i < tips.size(); ++i) {
        detail::write_json_file(tips_to_json(static_cast<int>(i), tips[i]), tips_file(dir, static_cast<int>(i)));
    }
}

std::vector<std::vector<TipCandidate>> read_tips(const std::filesystem::path& dir, int frame_count) {
    std::vector<std::vector<TipCandidate>> tips;
    for (int i = 0; i < frame_count; ++i) {
        auto t = read_stage_file(tips_file(dir, i), tips_from_json);
        for (const auto& c : t) {
            if (c.source_frame != i) throw_validation(tips_file(dir, i).string() + ": frame", "expected " + std::to_string(i));
        }
        tips.push_back(std::move(t));
    }
    return tips;
}

namespace {

GrayImage rasterize(const Polyline& p, int width, int height) {
    GrayImage img(width, height, 8, 0);
    const double len = polyline_length(p);
    const auto steps = static_cast<int>(std::ceil(len * 2.0));
    for (int i = 0; i <= steps; ++i) {
        const Point2 q = point_at(p, len * i / std::max(1, steps));
        const long x = std::lround(q.x);
        const long y = std::lround(q.y);
        if (x >= 0 && y >= 0 && x < width && y < height) img.at(static_cast<int>(x), static_cast<int>(y)) = 255;
    }
    return img;
}

}  // namespace

void write_overlays(const VoiddResult& r, const SequenceManifest& m, int width, int height,
                    const std::filesystem::path& dir) {
    ensure_dir(dir);
    const GrayImage blank(width, height, 8, 0);
    char name[48];
    for (std::size_t i = 0; i < m.navigation_frames.size(); ++i) {
        const auto it = r.per_frame_detection.find(static_cast<int>(i));
        std::snprintf(name, sizeof name, "overlay_%03zu_tip.pgm", i);
        write_pgm(it == r.per_frame_detection.end() ? blank : rasterize(it->second.tip.curve, width, height), dir / name);
        std::snprintf(name, sizeof name, "overlay_%03zu_voi.pgm", i);
        write_pgm(it == r.per_frame_detection.end() ? blank : rasterize(it->second.voi.polyline, width, height),
                  dir / name);
    }
}

}  // namespace voidd
