// voidd: vessel-of-intervention detection from guidewire tips.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "voidd/config.hpp"
#include "voidd/error.hpp"
#include "voidd/evaluation.hpp"
#include "voidd/image_io.hpp"
#include "voidd/json_util.hpp"
#include "voidd/manifest.hpp"
#include "voidd/min_tree.hpp"
#include "voidd/pipeline.hpp"
#include "voidd/serialization.hpp"
#include "voidd/synth.hpp"
#include "voidd/tip_candidates.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config;
    int jobs = 0;
    bool verbose = false;

    std::string manifest;
    std::string out_dir;
    std::string out;
    std::string spec;
    std::string graphs;
    std::string tips;
    std::string result;
    std::string ground_truth;
    std::string dump_tree;
    std::string dump_pairs;
    std::string overlay;
    bool tip_free = false;
};

voidd::PipelineConfig load_config(const Options& o) {
    return o.config.empty() ? voidd::PipelineConfig{} : voidd::read_config(o.config);
}

void write_text(const std::string& text, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw voidd::Error(voidd::ErrorKind::Io, "cannot write " + path.string());
    out << text;
}

void log_frames(const Options& o, const char* what, const std::vector<double>& seconds) {
    if (!o.verbose) return;
    double total = 0.0;
    for (std::size_t i = 0; i < seconds.size(); ++i) {
        std::fprintf(stderr, "%s frame %zu: %.4f s\n", what, i, seconds[i]);
        total += seconds[i];
    }
    if (!seconds.empty()) std::fprintf(stderr, "%s mean: %.4f s/frame\n", what, total / seconds.size());
}

int cmd_synth(const Options& o) {
    voidd::SceneSpec spec = o.spec.empty() ? voidd::default_scene()
                                           : voidd::scene_from_json(voidd::detail::read_json_file(o.spec));
    if (o.tip_free) {
        spec.guidewire.present = false;
        spec.dropout_fraction = 0.0;
    }
    const auto out = voidd::generate(spec, o.out_dir);
    if (o.verbose) std::fprintf(stderr, "wrote %s\n", out.manifest_path.string().c_str());
    return 0;
}

int cmd_extract_vessels(const Options& o) {
    const auto cfg = load_config(o);
    const auto m = voidd::read_manifest(o.manifest);
    const auto t0 = std::chrono::steady_clock::now();
    const auto graphs = voidd::extract_vessels(m, cfg, o.jobs);
    voidd::write_graphs(graphs, o.out_dir);
    if (o.verbose) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& g : graphs) {
            std::fprintf(stderr, "phase %d: %zu nodes, %zu edges\n", g.phase, g.nodes.size(), g.edges.size());
        }
        std::fprintf(stderr, "vessel extraction: %.3f s\n", s);
    }
    return 0;
}

int cmd_extract_tips(const Options& o) {
    const auto cfg = load_config(o);
    const auto m = voidd::read_manifest(o.manifest);
    std::vector<double> seconds;
    const auto tips = voidd::extract_tips(m, cfg, o.jobs, &seconds);
    voidd::write_tips(tips, o.out_dir);
    log_frames(o, "tips", seconds);
    if (!o.dump_tree.empty()) {
        fs::create_directories(o.dump_tree);
        char name[32];
        for (std::size_t i = 0; i < m.navigation_frames.size(); ++i) {
            const auto frame = voidd::read_pgm(m.resolve(m.navigation_frames[i].path));
            const auto tree = voidd::MinTree::build(voidd::prepare_navigation_frame(frame, cfg.tip.presmooth_sigma),
                                                    cfg.tip.connectivity);
            std::snprintf(name, sizeof name, "tree_%03zu.json", i);
            voidd::detail::write_json_file(voidd::tree_to_json(tree), fs::path(o.dump_tree) / name, -1);
        }
    }
    return 0;
}

struct TrackArtifacts {
    voidd::TrackingOutput tracking;
    json result;
};

TrackArtifacts run_track(const Options& o, const voidd::SequenceManifest& m, const voidd::PipelineConfig& cfg,
                         const std::vector<voidd::VesselGraph>& graphs,
                         const std::vector<std::vector<voidd::TipCandidate>>& tips) {
    TrackArtifacts a{voidd::track_sequence(m, tips, graphs, cfg, o.jobs), {}};
    a.result = voidd::result_to_json(a.tracking.result, m, cfg);
    const std::size_t n = m.navigation_frames.size();
    if (o.verbose && n > 0) {
        std::fprintf(stderr, "tracking: matching %.4f s, assignment %.4f s, %.4f s/frame\n",
                     a.tracking.matching_seconds, a.tracking.assignment_seconds,
                     (a.tracking.matching_seconds + a.tracking.assignment_seconds) / n);
        std::fprintf(stderr, "tracks: %zu, vessel track entries: %zu\n", a.tracking.result.tracks.size(),
                     a.tracking.result.per_frame_detection.size());
    }
    if (!o.dump_pairs.empty()) {
        fs::create_directories(o.dump_pairs);
        char name[32];
        for (const auto& f : a.tracking.pairs) {
            std::snprintf(name, sizeof name, "pairs_%03d.json", f.frame);
            voidd::detail::write_json_file(voidd::pairs_to_json(f.pairs), fs::path(o.dump_pairs) / name);
        }
    }
    if (!o.overlay.empty() && !m.navigation_frames.empty()) {
        const auto header = voidd::read_pgm_header(m.resolve(m.navigation_frames.front().path));
        voidd::write_overlays(a.tracking.result, m, header.width, header.height, o.overlay);
    }
    return a;
}

int cmd_track(const Options& o) {
    const auto cfg = load_config(o);
    const auto m = voidd::read_manifest(o.manifest);
    const auto graphs = voidd::read_graphs(o.graphs, m.cycle_length);
    const auto tips = voidd::read_tips(o.tips, static_cast<int>(m.navigation_frames.size()));
    const auto a = run_track(o, m, cfg, graphs, tips);
    voidd::detail::write_json_file(a.result, o.out);
    return 0;
}

void write_report(const voidd::EvalReport& report, const fs::path& json_path) {
    voidd::detail::write_json_file(voidd::report_to_json(report), json_path);
    fs::path txt = json_path;
    txt.replace_extension(".txt");
    write_text(voidd::report_table(report), txt);
}

int cmd_evaluate(const Options& o) {
    const auto cfg = load_config(o);
    const auto detections = voidd::detections_from_result_json(voidd::detail::read_json_file(o.result));
    const auto gt = voidd::read_ground_truth(o.ground_truth);
    const auto report = voidd::evaluate(detections, gt, cfg.evaluation);
    write_report(report, o.out);
    std::cout << voidd::report_table(report);
    return 0;
}

int cmd_run_all(const Options& o) {
    const auto cfg = load_config(o);
    const auto m = voidd::read_manifest(o.manifest);
    const fs::path out(o.out_dir);
    fs::create_directories(out);

    const auto t0 = std::chrono::steady_clock::now();
    voidd::write_graphs(voidd::extract_vessels(m, cfg, o.jobs), out / "graphs");
    std::vector<double> tip_seconds;
    voidd::write_tips(voidd::extract_tips(m, cfg, o.jobs, &tip_seconds), out / "tips");
    log_frames(o, "tips", tip_seconds);

    // Continue from the written stage files so the result equals chaining the
    // individual commands.
    const auto graphs = voidd::read_graphs(out / "graphs", m.cycle_length);
    const auto tips = voidd::read_tips(out / "tips", static_cast<int>(m.navigation_frames.size()));
    const auto a = run_track(o, m, cfg, graphs, tips);
    voidd::detail::write_json_file(a.result, out / "result.json");

    if (!m.ground_truth) {
        std::fprintf(stderr, "manifest has no ground truth; skipping evaluation\n");
        return 0;
    }
    const auto gt = voidd::read_ground_truth(m.resolve(m.ground_truth->voi_path));
    const auto detections = voidd::detections_from_result_json(voidd::detail::read_json_file(out / "result.json"));
    const auto report = voidd::evaluate(detections, gt, cfg.evaluation);
    write_report(report, out / "report.json");
    std::cout << voidd::report_table(report);
    if (o.verbose) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::fprintf(stderr, "run-all: %.2f s\n", s);
    }
    return 0;
}

int exit_code(voidd::ErrorKind kind) {
    switch (kind) {
        case voidd::ErrorKind::Io:
        case voidd::ErrorKind::Format:
            return 2;
        default:
            return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vessel-of-intervention detection from guidewire tips"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "Pipeline configuration JSON");
    app.add_option("--jobs", o.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_flag("--verbose", o.verbose, "Per-frame timing and stage summaries on stderr");

    auto* synth = app.add_subcommand("synth", "Render a synthetic reference + navigation sequence");
    synth->add_option("--spec", o.spec, "Scene spec JSON (default scene when omitted)");
    synth->add_option("--out-dir", o.out_dir, "Output directory")->required();
    synth->add_flag("--tip-free", o.tip_free, "Render without a guidewire");

    auto* vessels = app.add_subcommand("extract-vessels", "Vessel graph per reference phase");
    vessels->add_option("--manifest", o.manifest)->required();
    vessels->add_option("--out-dir", o.out_dir)->required();

    auto* tips = app.add_subcommand("extract-tips", "Tip candidates per navigation frame");
    tips->add_option("--manifest", o.manifest)->required();
    tips->add_option("--out-dir", o.out_dir)->required();
    tips->add_option("--dump-tree", o.dump_tree, "Write the min tree of every frame here");

    auto* track = app.add_subcommand("track", "Match tips to vessels and track the vessel-of-intervention");
    track->add_option("--manifest", o.manifest)->required();
    track->add_option("--graphs", o.graphs, "Directory written by extract-vessels")->required();
    track->add_option("--tips", o.tips, "Directory written by extract-tips")->required();
    track->add_option("--out", o.out, "Result JSON")->required();
    track->add_option("--dump-pairs", o.dump_pairs, "Write ranked feature pairs per frame here");
    track->add_option("--overlay", o.overlay, "Write tip / VOI mask PGMs per frame here");

    auto* evaluate = app.add_subcommand("evaluate", "TRE and detection classification against ground truth");
    evaluate->add_option("--result", o.result)->required();
    evaluate->add_option("--ground-truth", o.ground_truth)->required();
    evaluate->add_option("--out", o.out, "Report JSON; the text table goes next to it")->required();

    auto* all = app.add_subcommand("run-all", "Every stage from manifest to report");
    all->add_option("--manifest", o.manifest)->required();
    all->add_option("--out-dir", o.out_dir)->required();
    all->add_option("--dump-pairs", o.dump_pairs);
    all->add_option("--overlay", o.overlay);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) return cmd_synth(o);
        if (vessels->parsed()) return cmd_extract_vessels(o);
        if (tips->parsed()) return cmd_extract_tips(o);
        if (track->parsed()) return cmd_track(o);
        if (evaluate->parsed()) return cmd_evaluate(o);
        if (all->parsed()) return cmd_run_all(o);
    } catch (const voidd::Error& e) {
        std::fprintf(stderr, "voidd: %s\n", e.what());
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "voidd: %s\n", e.what());
        return 2;
    }
    return 1;
}
