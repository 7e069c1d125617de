// One [PASS]/[FAIL] line per acceptance criterion; exit status 1 if any fail.
//
//   voidd_acceptance [work_dir]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <json.hpp>
#include <random>
#include <string>

#include "voidd/config.hpp"
#include "voidd/evaluation.hpp"
#include "voidd/manifest.hpp"
#include "voidd/matching.hpp"
#include "voidd/min_tree.hpp"
#include "voidd/pipeline.hpp"
#include "voidd/skeleton.hpp"
#include "../support/oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace voidd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + VOIDD_CLI_PATH + "\" " + args + " > /dev/null";
    if (std::system(cmd.c_str()) != 0) throw std::runtime_error("command failed: " + cmd);
}

json run_all(const fs::path& manifest, const fs::path& out) {
    fs::remove_all(out);
    run_cli("run-all --manifest \"" + manifest.string() + "\" --out-dir \"" + out.string() + "\"");
    return json::parse(slurp(out / "report.json"));
}

Outcome min_tree_oracle() {
    std::mt19937_64 rng(20240601);
    const auto t0 = Clock::now();
    int mismatches = 0;
    std::string first;
    for (int i = 0; i < 1000; ++i) {
        const GrayImage img = oracle::random_image(rng, 8, 8, 4);
        for (const bool eight : {false, true}) {
            const MinTree tree = MinTree::build(img, eight ? Connectivity::Eight : Connectivity::Four);
            const std::string diff = oracle::compare_min_tree(tree, img, eight);
            if (!diff.empty() && mismatches++ == 0) first = diff;
        }
    }
    const double s = seconds_since(t0);
    return {mismatches == 0 && s < 10.0,
            fmt("1000 images x {4,8}-connectivity: %d mismatches, %.2f s (limit 10 s)", mismatches, s) +
                (first.empty() ? "" : "; " + first)};
}

Outcome frechet_oracle() {
    std::mt19937_64 rng(99);
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const auto p = oracle::random_curve(rng, 1 + rng() % 6);
        const auto q = oracle::random_curve(rng, 1 + rng() % 6);
        worst = std::max(worst, std::abs(discrete_frechet(p, q) - oracle::exhaustive_frechet(p, q)));
    }
    const double s = seconds_since(t0);
    return {worst <= 1e-9 && s < 5.0, fmt("max |dp - exhaustive| = %.3g, %.3f s (limit 5 s)", worst, s)};
}

Outcome elongation_calibration() {
    ComponentMoments disk;
    for (int y = -15; y <= 15; ++y) {
        for (int x = -15; x <= 15; ++x) {
            if (x * x + y * y <= 225) disk.add_pixel(x, y);
        }
    }
    ComponentMoments segment;
    std::vector<std::pair<int, int>> seg_pixels;
    for (int x = 0; x < 20; ++x) {
        segment.add_pixel(x, 0);
        seg_pixels.emplace_back(x, 0);
    }
    const double n = 20.0;
    const double closed_form = M_PI * (4.0 * (n * n - 1.0) / 12.0) / n;
    const double a_disk = elongation(disk);
    const double a_seg = elongation(segment);
    const double a_oracle = oracle::covariance_elongation(seg_pixels);
    const bool pass = std::abs(a_disk - 1.0) <= 0.10 && std::abs(a_seg - closed_form) <= 0.02 * closed_form &&
                      std::abs(a_seg - a_oracle) <= 1e-9 * a_oracle;
    return {pass, fmt("disk %.4f (1 +- 10%%), segment %.4f vs closed form %.4f, covariance oracle %.4f", a_disk, a_seg,
                      closed_form, a_oracle)};
}

Outcome tre_cases() {
    const Polyline gt({{10, 20}, {110, 20}});
    const double coincident = tre(gt, gt, 0.2);
    const double offset = tre(Polyline({{10, 21.5}, {110, 21.5}}), gt, 0.2);
    const bool below = classify_frame(true, true, 0.4999) == DetectionClass::Correct;
    const bool at = classify_frame(true, true, 0.5) == DetectionClass::Wrong;
    const bool above = classify_frame(true, true, 0.5001) == DetectionClass::Wrong;
    const bool pass = coincident == 0.0 && std::abs(offset - 0.3) <= 1e-6 && below && at && above;
    return {pass, fmt("coincident %.3g mm, 1.5 px offset %.9f mm; 0.4999 correct=%d, 0.5 wrong=%d, 0.5001 wrong=%d",
                      coincident, offset, below, at, above)};
}

Outcome thinning_suite() {
    std::mt19937_64 rng(4242);
    int topology = 0;
    int idempotence = 0;
    for (int i = 0; i < 200; ++i) {
        const BinaryMask blob = oracle::random_blob(rng, 48);
        const BinaryMask skel = thin(blob);
        if (oracle::foreground_components(skel) != oracle::foreground_components(blob) ||
            oracle::holes(skel) != oracle::holes(blob)) {
            ++topology;
        }
        if (!(thin(skel) == skel)) ++idempotence;
    }
    return {topology == 0 && idempotence == 0,
            fmt("200 blobs: %d topology changes, %d non-idempotent", topology, idempotence)};
}

Outcome navigation(const fs::path& work, json& report_out) {
    const auto t0 = Clock::now();
    fs::remove_all(work / "nav");
    run_cli("synth --out-dir \"" + (work / "nav").string() + "\"");
    report_out = run_all(work / "nav" / "manifest.json", work / "nav" / "run1");
    const double s = seconds_since(t0);
    const auto& r = report_out.at("rates");
    const double correct = r.at("correct").get<double>();
    const double wrong = r.at("wrong").get<double>();
    const double missed = r.at("missed").get<double>();
    const bool pass = correct >= 0.85 && wrong <= 0.05 && missed <= 0.10 && s < 180.0;
    return {pass, fmt("correct %.1f%% (>= 85), wrong %.1f%% (<= 5), missed %.1f%% (<= 10), %.1f s (limit 180 s)",
                      100.0 * correct, 100.0 * wrong, 100.0 * missed, s)};
}

Outcome tip_free(const fs::path& work) {
    const auto t0 = Clock::now();
    fs::remove_all(work / "free");
    run_cli("synth --tip-free --out-dir \"" + (work / "free").string() + "\"");
    const json rep = run_all(work / "free" / "manifest.json", work / "free" / "run");
    const double s = seconds_since(t0);
    const double false_rate = rep.at("rates").at("false").get<double>();
    const int frames = rep.at("frames").get<int>();
    return {false_rate <= 0.02 && s < 120.0 && frames == 60,
            fmt("%d frames, false %.1f%% (<= 2), %.1f s (limit 120 s)", frames, 100.0 * false_rate, s)};
}

Outcome tracking_speed(const fs::path& work) {
    const SequenceManifest m = read_manifest(work / "nav" / "manifest.json");
    const auto graphs = read_graphs(work / "nav" / "run1" / "graphs", m.cycle_length);
    const auto tips = read_tips(work / "nav" / "run1" / "tips", static_cast<int>(m.navigation_frames.size()));
    const TrackingOutput out = track_sequence(m, tips, graphs, PipelineConfig{}, 1);
    const double per_frame =
        (out.matching_seconds + out.assignment_seconds) / static_cast<double>(m.navigation_frames.size());
    return {per_frame <= 0.33,
            fmt("%.4f s/frame single-threaded (target 0.33, ceiling 1.0); matching %.3f s, assignment %.4f s",
                per_frame, out.matching_seconds, out.assignment_seconds)};
}

Outcome determinism(const fs::path& work) {
    run_all(work / "nav" / "manifest.json", work / "nav" / "run2");
    const bool report_same = slurp(work / "nav" / "run1" / "report.json") == slurp(work / "nav" / "run2" / "report.json");
    const bool result_same = slurp(work / "nav" / "run1" / "result.json") == slurp(work / "nav" / "run2" / "result.json");
    return {report_same && result_same, fmt("report identical=%d, result identical=%d", report_same, result_same)};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "voidd_acceptance";
    fs::create_directories(work);

    report("min-tree oracle equivalence", min_tree_oracle);
    report("frechet oracle equivalence", frechet_oracle);
    report("elongation calibration", elongation_calibration);
    report("tre analytic cases", tre_cases);
    json nav_report;
    bool nav_ran = false;
    report("end-to-end navigation", [&] {
        auto o = navigation(work, nav_report);
        nav_ran = true;
        return o;
    });
    report("end-to-end tip-free", [&] { return tip_free(work); });
    report("thinning topology", thinning_suite);
    report("tracking speed", [&] {
        if (!nav_ran) return Outcome{false, "navigation sequence unavailable"};
        return tracking_speed(work);
    });
    report("determinism", [&] {
        if (!nav_ran) return Outcome{false, "navigation sequence unavailable"};
        return determinism(work);
    });

    std::printf("%d failed\n", failures);
    return failures == 0 ? 0 : 1;
}
