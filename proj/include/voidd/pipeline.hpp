#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "voidd/config.hpp"
#include "voidd/evaluation.hpp"
#include "voidd/manifest.hpp"
#include "voidd/tip_candidates.hpp"
#include "voidd/tracker.hpp"
#include "voidd/vessel_map.hpp"

namespace voidd {

/// Runs fn(0..n-1) on up to `jobs` threads (0 = hardware concurrency). The
/// exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// One graph per phase, indexed by phase.
std::vector<VesselGraph> extract_vessels(const SequenceManifest& m, const PipelineConfig& cfg, int jobs);

/// Tip candidates per navigation frame. Optional per-frame seconds.
std::vector<std::vector<TipCandidate>> extract_tips(const SequenceManifest& m, const PipelineConfig& cfg, int jobs,
                                                    std::vector<double>* seconds = nullptr);

/// Feature pairs per navigation frame against the iso-phase graph.
std::vector<FramePairs> match_frames(const SequenceManifest& m, const std::vector<std::vector<TipCandidate>>& tips,
                                     const std::vector<VesselGraph>& graphs, const PipelineConfig& cfg, int jobs,
                                     std::vector<double>* seconds = nullptr);

struct TrackingOutput {
    std::vector<FramePairs> pairs;
    VoiddResult result;
    double matching_seconds = 0.0;
    double assignment_seconds = 0.0;
};

/// Matching followed by track assignment.
TrackingOutput track_sequence(const SequenceManifest& m, const std::vector<std::vector<TipCandidate>>& tips,
                              const std::vector<VesselGraph>& graphs, const PipelineConfig& cfg, int jobs);

nlohmann::json result_to_json(const VoiddResult& r, const SequenceManifest& m, const PipelineConfig& cfg);
DetectionSequence detections_from_result_json(const nlohmann::json& j);
DetectionSequence detections_from_result(const VoiddResult& r, const SequenceManifest& m);

/// Ground truth referenced by the manifest; validation-error if it has none.
GroundTruth manifest_ground_truth(const SequenceManifest& m);

// Stage files --------------------------------------------------------------

std::filesystem::path graph_file(const std::filesystem::path& dir, int phase);
std::filesystem::path tips_file(const std::filesystem::path& dir, int frame);

void write_graphs(const std::vector<VesselGraph>& graphs, const std::filesystem::path& dir);
/// io-error when a phase file is missing.
std::vector<VesselGraph> read_graphs(const std::filesystem::path& dir, int cycle_length);

void write_tips(const std::vector<std::vector<TipCandidate>>& tips, const std::filesystem::path& dir);
std::vector<std::vector<TipCandidate>> read_tips(const std::filesystem::path& dir, int frame_count);

/// Separate tip / VOI masks per navigation frame for the vessel track.
void write_overlays(const VoiddResult& r, const SequenceManifest& m, int width, int height,
                    const std::filesystem::path& dir);

}  // namespace voidd
