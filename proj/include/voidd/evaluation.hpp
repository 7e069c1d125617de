#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "voidd/geometry.hpp"

namespace voidd {

/// Mean point-to-segment distance from n equispaced points of x to gt,
/// converted to millimetres. Throws invalid-argument for n < 2.
double tre(const Polyline& x, const Polyline& gt, double spacing_mm, std::size_t n = 64);

enum class DetectionClass { Correct, Wrong, Missed, False, TrueNegative };

const char* to_string(DetectionClass c) noexcept;

/// tre_mm must be given exactly when a detection exists and the tip is present.
DetectionClass classify_frame(bool detection, bool tip_present, std::optional<double> tre_mm,
                              double threshold_mm = 0.5);

struct GroundTruth {
    /// Navigated branch in the coordinates of reference phase 0.
    Polyline voi;
    /// Same branch per reference phase; used when a detection carries a phase.
    std::map<int, Polyline> voi_by_phase;
    std::vector<bool> tip_present;
    double pixel_spacing_mm = 0.0;

    [[nodiscard]] const Polyline& voi_for_phase(int phase) const;
    void validate() const;
};

nlohmann::json ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);
GroundTruth read_ground_truth(const std::filesystem::path& path);

/// Detected VOI per frame, as produced by the tracker.
struct DetectionSequence {
    int frame_count = 0;
    std::vector<int> phases;  // per frame
    std::map<int, Polyline> voi;
};

struct EvalConfig {
    std::size_t tre_points = 64;
    double threshold_mm = 0.5;

    void validate() const;
};

struct FrameEvaluation {
    int frame = 0;
    int phase = 0;
    DetectionClass outcome = DetectionClass::TrueNegative;
    std::optional<double> tre_mm;
};

struct EvalReport {
    std::array<int, 5> counts{};  // indexed by DetectionClass
    std::vector<FrameEvaluation> frames;

    [[nodiscard]] int count(DetectionClass c) const { return counts[static_cast<int>(c)]; }
    [[nodiscard]] int total() const;
    /// Fraction of all evaluated frames.
    [[nodiscard]] double rate(DetectionClass c) const;
    [[nodiscard]] int frames_with_tip() const;
    [[nodiscard]] int frames_without_tip() const;
    [[nodiscard]] std::optional<double> mean_tre_mm() const;
};

/// Throws validation-error when the ground truth does not cover the frames.
EvalReport evaluate(const DetectionSequence& detections, const GroundTruth& gt, const EvalConfig& cfg = {});

nlohmann::json report_to_json(const EvalReport& r);
/// Aligned text table with the correct / wrong / missed / false columns.
std::string report_table(const EvalReport& r);

}  // namespace voidd
