#include <doctest.h>

#include <json.hpp>
#include <string>

#include "voidd/config.hpp"
#include "voidd/error.hpp"
#include "voidd/manifest.hpp"

using namespace voidd;
using nlohmann::json;

namespace {

json valid_manifest() {
    return json{{"pixel_spacing_mm", 0.2},
                {"frame_interval_s", 0.0667},
                {"cycle_length", 2},
                {"reference_frames", json::array({{{"path", "r0.pgm"}, {"phase", 0}}, {{"path", "r1.pgm"}, {"phase", 1}}})},
                {"navigation_frames", json::array({{{"path", "n0.pgm"}}, {{"path", "n1.pgm"}}, {{"path", "n2.pgm"}}})}};
}

std::string validation_message(const json& j) {
    try {
        manifest_from_json(j);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("valid manifest parses with default phases") {
    const SequenceManifest m = manifest_from_json(valid_manifest());
    REQUIRE(m.navigation_frames.size() == 3);
    CHECK(m.navigation_frames[2].phase == 0);
    CHECK(m.navigation_frames[1].phase == 1);
    CHECK(m.reference_for_phase(1).path == "r1.pgm");
    const SequenceManifest back = manifest_from_json(manifest_to_json(m));
    CHECK(back.navigation_frames[1].phase == 1);
}

TEST_CASE("manifest validation names the field") {
    json j = valid_manifest();
    j["pixel_spacing_mm"] = -1.0;
    CHECK(validation_message(j).find("pixel_spacing_mm") != std::string::npos);

    j = valid_manifest();
    j["cycle_length"] = 1;
    CHECK(validation_message(j).find("cycle_length") != std::string::npos);

    j = valid_manifest();
    j["reference_frames"][1]["phase"] = 0;
    CHECK(validation_message(j).find("reference_frames") != std::string::npos);

    j = valid_manifest();
    j["navigation_frames"][0]["phase"] = 5;
    CHECK(validation_message(j).find("navigation_frames[0]") != std::string::npos);

    j = valid_manifest();
    j["ground_truth"] = {{"voi_path", "gt.json"}, {"tip_presence", {true}}};
    CHECK(validation_message(j).find("tip_presence") != std::string::npos);

    j = valid_manifest();
    j.erase("frame_interval_s");
    CHECK(validation_message(j).find("frame_interval_s") != std::string::npos);
}

TEST_CASE("missing images are io errors") {
    SequenceManifest m = manifest_from_json(valid_manifest());
    m.base_dir = "/nonexistent";
    const auto path = std::filesystem::temp_directory_path() / "voidd_unit_manifest.json";
    write_manifest(m, path);
    try {
        read_manifest(path);
        FAIL("expected an exception");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Io);
    }
    CHECK_NOTHROW(read_manifest(path, false));
    std::filesystem::remove(path);
}

TEST_CASE("config defaults and overrides") {
    const PipelineConfig defaults = config_from_json(json::object());
    CHECK(defaults.tip.t_min == 5.0);
    CHECK(defaults.tip.t_max == 150.0);
    CHECK(defaults.tip.a_min == 30);
    CHECK(defaults.tip.a_max == 3000);
    CHECK(defaults.evaluation.threshold_mm == 0.5);

    const PipelineConfig c = config_from_json(json{{"matching", {{"max_paths", 8}}}, {"tracker", {{"lambda", 30.0}}}});
    CHECK(c.matching.max_paths == 8);
    CHECK(c.tracker.resolved_lambda() == 30.0);

    const PipelineConfig back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(config_from_json(json{{"bogus", 1}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"tracker", {{"speed", 1}}}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"tip_segmentation", {{"connectivity", 6}}}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"tip_segmentation", {{"t_min", 200.0}}}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"vessel", {{"scales", {0.1}}}}}), Error);
}
