#pragma once

#include <filesystem>

#include <json.hpp>

#include "voidd/evaluation.hpp"
#include "voidd/matching.hpp"
#include "voidd/min_tree.hpp"
#include "voidd/tracker.hpp"
#include "voidd/vessel_map.hpp"

namespace voidd {

/// Every tunable of the pipeline. JSON sections: tip_segmentation, vessel,
/// matching, tracker, evaluation. Missing fields take defaults; unknown keys
/// are rejected.
struct PipelineConfig {
    TipSegConfig tip;
    VesselExtractionConfig vessel;
    MatchConfig matching;
    TrackerConfig tracker;
    EvalConfig evaluation;

    /// Throws validation-error naming the section.
    void validate() const;
};

PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& c);
PipelineConfig read_config(const std::filesystem::path& path);

}  // namespace voidd
