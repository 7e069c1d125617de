#include "voidd/config.hpp"

#include "voidd/error.hpp"
#include "voidd/json_util.hpp"

namespace voidd {

using nlohmann::json;

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& obj, const char* key, const std::string& prefix) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return detail::get_as<double>(obj.at(key), detail::join_field(prefix, key));
}

template <typename Fn>
void checked(const char* section, Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidArgument) throw;
        throw_validation(section, e.detail());
    }
}

}  // namespace

void PipelineConfig::validate() const {
    checked("tip_segmentation", [&] { tip.validate(); });
    checked("vessel", [&] { vessel.validate(); });
    checked("matching", [&] { matching.validate(); });
    checked("tracker", [&] { tracker.validate(); });
    checked("evaluation", [&] { evaluation.validate(); });
}

json config_to_json(const PipelineConfig& c) {
    return json{
        {"tip_segmentation",
         {{"t_min", c.tip.t_min},
          {"t_max", c.tip.t_max},
          {"a_min", c.tip.a_min},
          {"a_max", c.tip.a_max},
          {"connectivity", static_cast<int>(c.tip.connectivity)},
          {"presmooth_sigma", c.tip.presmooth_sigma},
          {"max_candidates", c.tip.max_candidates},
          {"min_curve_length", c.tip.min_curve_length}}},
        {"vessel",
         {{"scales", c.vessel.scales},
          {"t_high", optional_json(c.vessel.t_high)},
          {"t_low", optional_json(c.vessel.t_low)},
          {"high_percentile", c.vessel.high_percentile},
          {"low_ratio", c.vessel.low_ratio},
          {"min_component", c.vessel.min_component},
          {"spur_length", c.vessel.spur_length},
          {"gap_radius", c.vessel.gap_radius},
          {"contract_length", c.vessel.graph.contract_length},
          {"smoothing_window", c.vessel.graph.smoothing_window}}},
        {"matching",
         {{"neighborhood_radius", optional_json(c.matching.neighborhood_radius)},
          {"max_paths", c.matching.max_paths},
          {"lambda_s", optional_json(c.matching.lambda_s)},
          {"frechet_reject", c.matching.frechet_reject},
          {"resample_count", c.matching.resample_count},
          {"max_length_factor", c.matching.max_length_factor},
          {"min_length_factor", c.matching.min_length_factor}}},
        {"tracker",
         {{"tip_length_px", c.tracker.tip_length_px},
          {"lambda", optional_json(c.tracker.lambda)},
          {"v_max_px_per_s", c.tracker.v_max_px_per_s},
          {"tad_threshold", optional_json(c.tracker.tad_threshold)},
          {"new_track_top_k", c.tracker.new_track_top_k},
          {"tip_resample", c.tracker.tip_resample}}},
        {"evaluation", {{"tre_points", c.evaluation.tre_points}, {"threshold_mm", c.evaluation.threshold_mm}}},
    };
}

PipelineConfig config_from_json(const json& j) {
    using detail::reject_unknown_keys;
    using detail::value_or;
    reject_unknown_keys(j, {"tip_segmentation", "vessel", "matching", "tracker", "evaluation"}, "");
    PipelineConfig c;
    const json empty = json::object();
    auto section = [&](const char* name) -> const json& { return j.contains(name) ? j.at(name) : empty; };

    {
        const std::string p = "tip_segmentation";
        const json& o = section("tip_segmentation");
        reject_unknown_keys(o,
                            {"t_min", "t_max", "a_min", "a_max", "connectivity", "presmooth_sigma", "max_candidates",
                             "min_curve_length"},
                            p);
        c.tip.t_min = value_or(o, "t_min", c.tip.t_min, p);
        c.tip.t_max = value_or(o, "t_max", c.tip.t_max, p);
        c.tip.a_min = value_or(o, "a_min", c.tip.a_min, p);
        c.tip.a_max = value_or(o, "a_max", c.tip.a_max, p);
        const int conn = value_or(o, "connectivity", static_cast<int>(c.tip.connectivity), p);
        if (conn != 4 && conn != 8) throw_validation(p + ".connectivity", "must be 4 or 8");
        c.tip.connectivity = conn == 8 ? Connectivity::Eight : Connectivity::Four;
        c.tip.presmooth_sigma = value_or(o, "presmooth_sigma", c.tip.presmooth_sigma, p);
        c.tip.max_candidates = value_or(o, "max_candidates", c.tip.max_candidates, p);
        c.tip.min_curve_length = value_or(o, "min_curve_length", c.tip.min_curve_length, p);
    }
    {
        const std::string p = "vessel";
        const json& o = section("vessel");
        reject_unknown_keys(o,
                            {"scales", "t_high", "t_low", "high_percentile", "low_ratio", "min_component",
                             "spur_length", "gap_radius", "contract_length", "smoothing_window"},
                            p);
        c.vessel.scales = value_or(o, "scales", c.vessel.scales, p);
        c.vessel.t_high = optional_from(o, "t_high", p);
        c.vessel.t_low = optional_from(o, "t_low", p);
        c.vessel.high_percentile = value_or(o, "high_percentile", c.vessel.high_percentile, p);
        c.vessel.low_ratio = value_or(o, "low_ratio", c.vessel.low_ratio, p);
        c.vessel.min_component = value_or(o, "min_component", c.vessel.min_component, p);
        c.vessel.spur_length = value_or(o, "spur_length", c.vessel.spur_length, p);
        c.vessel.gap_radius = value_or(o, "gap_radius", c.vessel.gap_radius, p);
        c.vessel.graph.contract_length = value_or(o, "contract_length", c.vessel.graph.contract_length, p);
        c.vessel.graph.smoothing_window = value_or(o, "smoothing_window", c.vessel.graph.smoothing_window, p);
    }
    {
        const std::string p = "matching";
        const json& o = section("matching");
        reject_unknown_keys(o,
                            {"neighborhood_radius", "max_paths", "lambda_s", "frechet_reject", "resample_count",
                             "max_length_factor", "min_length_factor"},
                            p);
        c.matching.neighborhood_radius = optional_from(o, "neighborhood_radius", p);
        c.matching.max_paths = value_or(o, "max_paths", c.matching.max_paths, p);
        c.matching.lambda_s = optional_from(o, "lambda_s", p);
        c.matching.frechet_reject = value_or(o, "frechet_reject", c.matching.frechet_reject, p);
        c.matching.resample_count = value_or(o, "resample_count", c.matching.resample_count, p);
        c.matching.max_length_factor = value_or(o, "max_length_factor", c.matching.max_length_factor, p);
        c.matching.min_length_factor = value_or(o, "min_length_factor", c.matching.min_length_factor, p);
    }
    {
        const std::string p = "tracker";
        const json& o = section("tracker");
        reject_unknown_keys(
            o, {"tip_length_px", "lambda", "v_max_px_per_s", "tad_threshold", "new_track_top_k", "tip_resample"}, p);
        c.tracker.tip_length_px = value_or(o, "tip_length_px", c.tracker.tip_length_px, p);
        c.tracker.lambda = optional_from(o, "lambda", p);
        c.tracker.v_max_px_per_s = value_or(o, "v_max_px_per_s", c.tracker.v_max_px_per_s, p);
        c.tracker.tad_threshold = optional_from(o, "tad_threshold", p);
        c.tracker.new_track_top_k = value_or(o, "new_track_top_k", c.tracker.new_track_top_k, p);
        c.tracker.tip_resample = value_or(o, "tip_resample", c.tracker.tip_resample, p);
    }
    {
        const std::string p = "evaluation";
        const json& o = section("evaluation");
        reject_unknown_keys(o, {"tre_points", "threshold_mm"}, p);
        c.evaluation.tre_points = value_or(o, "tre_points", c.evaluation.tre_points, p);
        c.evaluation.threshold_mm = value_or(o, "threshold_mm", c.evaluation.threshold_mm, p);
    }
    c.validate();
    return c;
}

PipelineConfig read_config(const std::filesystem::path& path) {
    const json j = detail::read_json_file(path);
    try {
        return config_from_json(j);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

}  // namespace voidd
