#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace voidd {

struct FrameRef {
    std::string path;  // relative paths resolve against the manifest directory
    int phase = 0;
};

struct GroundTruthRef {
    std::string voi_path;
    std::vector<bool> tip_presence;
};

/// Reference (contrast-injected, one frame per cardiac phase) and navigation
/// sequences plus acquisition metadata.
struct SequenceManifest {
    double pixel_spacing_mm = 0.0;
    double frame_interval_s = 0.0;
    int cycle_length = 0;
    std::vector<FrameRef> reference_frames;
    std::vector<FrameRef> navigation_frames;
    std::optional<GroundTruthRef> ground_truth;

    std::filesystem::path base_dir;  // not serialized

    [[nodiscard]] std::filesystem::path resolve(const std::string& rel) const;
    /// Reference frame for a phase; the manifest guarantees exactly one.
    [[nodiscard]] const FrameRef& reference_for_phase(int phase) const;
};

/// Parses and validates; when check_files is set every referenced image must
/// exist (io-error otherwise) and all must share dimensions.
SequenceManifest read_manifest(const std::filesystem::path& path, bool check_files = true);

/// Validation without touching the filesystem. Throws validation-error naming
/// the offending field.
void validate_manifest(const SequenceManifest& m);

SequenceManifest manifest_from_json(const nlohmann::json& j);
nlohmann::json manifest_to_json(const SequenceManifest& m);
void write_manifest(const SequenceManifest& m, const std::filesystem::path& path);

}  // namespace voidd
