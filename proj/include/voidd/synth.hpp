#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "voidd/evaluation.hpp"
#include "voidd/geometry.hpp"
#include "voidd/image.hpp"
#include "voidd/manifest.hpp"

namespace voidd {

/// Cubic Bezier vessel segment. A branch with a parent starts at the parent's
/// point at parameter attach_t; its first control point is replaced by it.
struct BranchSpec {
    int parent = -1;
    double attach_t = 1.0;
    std::array<Point2, 4> control{};
    double sigma = 2.5;   // Gaussian cross-section, px
    double depth = 70.0;  // intensity drop at the centerline
};

struct GuidewireSpec {
    bool present = true;
    /// Leaf of the navigated root-to-branch path.
    int branch = 1;
    double tip_length_px = 60.0;
    double speed_px_per_frame = 3.0;
    /// Arc length of the tip's leading end in frame 0; defaults to the tip length.
    std::optional<double> start_px;
    double sigma = 0.9;
    double depth = 35.0;
};

/// Per-phase smooth warp: sinusoidal translation, rotation and scale about the
/// image center plus a small radial term. Phase 0 is the identity.
struct MotionSpec {
    double translation_px = 4.0;
    double rotation_deg = 1.5;
    double scale = 0.015;
    double radial_px = 1.5;
};

enum class DistractorKind { Catheter, Lead };

struct DistractorSpec {
    DistractorKind kind = DistractorKind::Catheter;
    std::array<Point2, 4> control{};
    double width = 14.0;  // full width of the flat core (catheter) or 2.5 sigma (lead)
    double depth = 40.0;
};

struct SceneSpec {
    int width = 512;
    int height = 512;
    int cycle_length = 12;
    int n_navigation_frames = 60;
    double pixel_spacing_mm = 0.2;
    double frame_interval_s = 1.0 / 15.0;
    double background = 200.0;
    double background_ripple = 10.0;
    std::vector<BranchSpec> tree;
    GuidewireSpec guidewire;
    MotionSpec motion;
    double noise_sigma = 3.0;
    double reference_noise_sigma = 2.0;
    std::vector<DistractorSpec> distractors;
    /// Fraction of navigation frames whose tip is blurred beyond detection.
    double dropout_fraction = 0.0;
    std::uint64_t seed = 7;

    /// Throws invalid-argument on inconsistent settings.
    void validate() const;
};

/// Default coronary-like tree, navigated branch 1 through a bifurcation, and a
/// catheter distractor away from the vessels.
SceneSpec default_scene();
/// default_scene() without a guidewire.
SceneSpec tip_free_scene();

SceneSpec scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const SceneSpec& s);

/// Point warp of a phase.
Point2 warp_point(const SceneSpec& s, int phase, Point2 p);

/// Root-to-branch centerline in phase-0 coordinates, ~1 px vertex spacing.
Polyline navigated_path(const SceneSpec& s);

struct SceneRender {
    std::vector<GrayImage> reference;   // index = phase
    std::vector<GrayImage> navigation;  // index = frame
    std::vector<int> navigation_phase;
    std::vector<std::optional<Polyline>> true_tips;  // warped, per frame
    std::vector<bool> dropped;                       // blurred tip frames
    GroundTruth ground_truth;
};

/// In-memory rendering; a pure function of the scene.
SceneRender render_scene(const SceneSpec& s);

struct SynthOutput {
    SequenceManifest manifest;
    GroundTruth ground_truth;
    std::filesystem::path manifest_path;
};

/// Renders and writes reference/ and navigation/ PGMs, ground_truth.json and
/// manifest.json into out_dir.
SynthOutput generate(const SceneSpec& s, const std::filesystem::path& out_dir);

}  // namespace voidd
