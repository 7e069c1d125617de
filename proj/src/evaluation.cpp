#include "voidd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "voidd/error.hpp"
#include "voidd/json_util.hpp"
#include "voidd/serialization.hpp"

namespace voidd {

using nlohmann::json;

double tre(const Polyline& x, const Polyline& gt, double spacing_mm, std::size_t n) {
    if (n < 2) throw_invalid_argument("TRE needs at least 2 sample points");
    if (!(spacing_mm > 0.0)) throw_invalid_argument("TRE needs a positive pixel spacing");
    if (!(polyline_length(gt) > 0.0)) throw_invalid_argument("degenerate ground-truth polyline");
    const Polyline samples = resample(x, n);
    double sum = 0.0;
    for (const auto& q : samples.points()) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j + 1 < gt.size(); ++j) best = std::min(best, point_segment_distance(q, gt[j], gt[j + 1]));
        sum += best;
    }
    return sum / static_cast<double>(n) * spacing_mm;
}

const char* to_string(DetectionClass c) noexcept {
    switch (c) {
        case DetectionClass::Correct: return "correct";
        case DetectionClass::Wrong: return "wrong";
        case DetectionClass::Missed: return "missed";
        case DetectionClass::False: return "false";
        case DetectionClass::TrueNegative: return "true_negative";
    }
    return "unknown";
}

DetectionClass classify_frame(bool detection, bool tip_present, std::optional<double> tre_mm, double threshold_mm) {
    if (tre_mm.has_value() != (detection && tip_present)) {
        throw_invalid_argument("a TRE value is required exactly when a detection exists and the tip is present");
    }
    if (tip_present) {
        if (!detection) return DetectionClass::Missed;
        return *tre_mm < threshold_mm ? DetectionClass::Correct : DetectionClass::Wrong;
    }
    return detection ? DetectionClass::False : DetectionClass::TrueNegative;
}

const Polyline& GroundTruth::voi_for_phase(int phase) const {
    const auto it = voi_by_phase.find(phase);
    return it == voi_by_phase.end() ? voi : it->second;
}

void GroundTruth::validate() const {
    if (!(pixel_spacing_mm > 0.0)) throw_validation("pixel_spacing_mm", "must be positive");
}

json ground_truth_to_json(const GroundTruth& gt) {
    json by_phase = json::array();
    for (const auto& [phase, line] : gt.voi_by_phase) {
        by_phase.push_back({{"phase", phase}, {"points", points_to_json(line.points())}});
    }
    return json{{"pixel_spacing_mm", gt.pixel_spacing_mm},
                {"voi", polyline_to_json(gt.voi)},
                {"voi_by_phase", std::move(by_phase)},
                {"tip_present", gt.tip_present}};
}

GroundTruth ground_truth_from_json(const json& j) {
    using detail::require;
    detail::reject_unknown_keys(j, {"pixel_spacing_mm", "voi", "voi_by_phase", "tip_present", "tips"}, "");
    GroundTruth gt{polyline_from_json(require<json>(j, "voi"), "voi"), {}, {}, 0.0};
    gt.pixel_spacing_mm = require<double>(j, "pixel_spacing_mm");
    gt.tip_present = require<std::vector<bool>>(j, "tip_present");
    if (j.contains("voi_by_phase")) {
        const auto& arr = j.at("voi_by_phase");
        if (!arr.is_array()) throw_validation("voi_by_phase", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string prefix = "voi_by_phase[" + std::to_string(i) + "]";
            const int phase = require<int>(arr[i], "phase", prefix);
            if (!gt.voi_by_phase.emplace(phase, polyline_from_json(arr[i], prefix)).second) {
                throw_validation(prefix + ".phase", "duplicate phase " + std::to_string(phase));
            }
        }
    }
    gt.validate();
    return gt;
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
    const json j = detail::read_json_file(path);
    try {
        return ground_truth_from_json(j);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

void EvalConfig::validate() const {
    if (tre_points < 2) throw_invalid_argument("evaluation.tre_points must be at least 2");
    if (!(threshold_mm > 0.0)) throw_invalid_argument("evaluation.threshold_mm must be positive");
}

int EvalReport::total() const {
    int t = 0;
    for (const int c : counts) t += c;
    return t;
}

double EvalReport::rate(DetectionClass c) const {
    const int t = total();
    return t == 0 ? 0.0 : static_cast<double>(count(c)) / t;
}

int EvalReport::frames_with_tip() const {
    return count(DetectionClass::Correct) + count(DetectionClass::Wrong) + count(DetectionClass::Missed);
}

int EvalReport::frames_without_tip() const {
    return count(DetectionClass::False) + count(DetectionClass::TrueNegative);
}

std::optional<double> EvalReport::mean_tre_mm() const {
    double sum = 0.0;
    int n = 0;
    for (const auto& f : frames) {
        if (f.tre_mm) {
            sum += *f.tre_mm;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

EvalReport evaluate(const DetectionSequence& detections, const GroundTruth& gt, const EvalConfig& cfg) {
    cfg.validate();
    gt.validate();
    if (static_cast<int>(gt.tip_present.size()) != detections.frame_count) {
        throw_validation("tip_present", "ground truth covers " + std::to_string(gt.tip_present.size()) +
                                            " frames but the result has " +
                                            std::to_string(detections.frame_count));
    }
    if (static_cast<int>(detections.phases.size()) != detections.frame_count) {
        throw_validation("phases", "one phase per frame required");
    }
    for (const auto& [frame, _] : detections.voi) {
        if (frame < 0 || frame >= detections.frame_count) {
            throw_validation("frames", "detection for frame " + std::to_string(frame) + " outside the sequence");
        }
    }
    EvalReport r;
    for (int f = 0; f < detections.frame_count; ++f) {
        FrameEvaluation fe;
        fe.frame = f;
        fe.phase = detections.phases[f];
        const auto it = detections.voi.find(f);
        const bool detected = it != detections.voi.end();
        const bool present = gt.tip_present[f];
        if (detected && present) {
            fe.tre_mm = tre(it->second, gt.voi_for_phase(fe.phase), gt.pixel_spacing_mm, cfg.tre_points);
        }
        fe.outcome = classify_frame(detected, present, fe.tre_mm, cfg.threshold_mm);
        ++r.counts[static_cast<int>(fe.outcome)];
        r.frames.push_back(fe);
    }
    return r;
}

namespace {

json percent_or_null(int num, int den) {
    if (den == 0) return nullptr;
    return 100.0 * num / den;
}

constexpr DetectionClass kAll[] = {DetectionClass::Correct, DetectionClass::Wrong, DetectionClass::Missed,
                                   DetectionClass::False, DetectionClass::TrueNegative};

}  // namespace

json report_to_json(const EvalReport& r) {
    json counts = json::object();
    json rates = json::object();
    for (const auto c : kAll) {
        counts[to_string(c)] = r.count(c);
        rates[to_string(c)] = r.rate(c);
    }
    json per_frame = json::array();
    for (const auto& f : r.frames) {
        per_frame.push_back({{"frame", f.frame},
                             {"phase", f.phase},
                             {"outcome", to_string(f.outcome)},
                             {"tre_mm", f.tre_mm ? json(*f.tre_mm) : json(nullptr)}});
    }
    const int with_tip = r.frames_with_tip();
    const int without_tip = r.frames_without_tip();
    const auto mean = r.mean_tre_mm();
    return json{{"frames", r.total()},
                {"frames_with_tip", with_tip},
                {"frames_without_tip", without_tip},
                {"counts", std::move(counts)},
                {"rates", std::move(rates)},
                {"table",
                 {{"correct_detection_pct", percent_or_null(r.count(DetectionClass::Correct), with_tip)},
                  {"wrong_detection_pct", percent_or_null(r.count(DetectionClass::Wrong), with_tip)},
                  {"missed_detection_pct", percent_or_null(r.count(DetectionClass::Missed), with_tip)},
                  {"false_detection_pct", percent_or_null(r.count(DetectionClass::False), without_tip)}}},
                {"mean_tre_mm", mean ? json(*mean) : json(nullptr)},
                {"per_frame", std::move(per_frame)}};
}

std::string report_table(const EvalReport& r) {
    auto cell = [](int num, int den) {
        char buf[32];
        if (den == 0) {
            std::snprintf(buf, sizeof buf, "%12s", "-");
        } else {
            std::snprintf(buf, sizeof buf, "%4d (%5.1f%%)", num, 100.0 * num / den);
        }
        return std::string(buf);
    };
    const int with_tip = r.frames_with_tip();
    const int without_tip = r.frames_without_tip();
    std::ostringstream out;
    char head[160];
    std::snprintf(head, sizeof head, "%-8s %-14s %-14s %-14s %-14s %-14s\n", "frames", "correct", "wrong", "missed",
                  "false", "true_negative");
    out << head;
    char row[200];
    std::snprintf(row, sizeof row, "%-8d %-14s %-14s %-14s %-14s %-14s\n", r.total(),
                  cell(r.count(DetectionClass::Correct), with_tip).c_str(),
                  cell(r.count(DetectionClass::Wrong), with_tip).c_str(),
                  cell(r.count(DetectionClass::Missed), with_tip).c_str(),
                  cell(r.count(DetectionClass::False), without_tip).c_str(),
                  cell(r.count(DetectionClass::TrueNegative), without_tip).c_str());
    out << row;
    if (const auto mean = r.mean_tre_mm()) {
        char tail[64];
        std::snprintf(tail, sizeof tail, "mean TRE %.3f mm\n", *mean);
        out << tail;
    }
    return out.str();
}

}  // namespace voidd
