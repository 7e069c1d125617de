#include "voidd/manifest.hpp"

#include <cmath>
#include <optional>

#include "voidd/error.hpp"
#include "voidd/image_io.hpp"
#include "voidd/json_util.hpp"

namespace voidd {

using detail::json;

std::filesystem::path SequenceManifest::resolve(const std::string& rel) const {
    const std::filesystem::path p(rel);
    return p.is_absolute() ? p : base_dir / p;
}

const FrameRef& SequenceManifest::reference_for_phase(int phase) const {
    for (const auto& r : reference_frames) {
        if (r.phase == phase) return r;
    }
    throw_invalid_argument("no reference frame for phase " + std::to_string(phase));
}

void validate_manifest(const SequenceManifest& m) {
    if (!(m.pixel_spacing_mm > 0.0) || !std::isfinite(m.pixel_spacing_mm)) {
        throw_validation("pixel_spacing_mm", "must be a positive number");
    }
    if (!(m.frame_interval_s > 0.0) || !std::isfinite(m.frame_interval_s)) {
        throw_validation("frame_interval_s", "must be a positive number");
    }
    if (m.cycle_length < 2 || m.cycle_length > 64) {
        throw_validation("cycle_length", "must lie in [2, 64], got " + std::to_string(m.cycle_length));
    }
    std::vector<int> seen(static_cast<std::size_t>(m.cycle_length), 0);
    for (std::size_t i = 0; i < m.reference_frames.size(); ++i) {
        const int phase = m.reference_frames[i].phase;
        const std::string field = "reference_frames[" + std::to_string(i) + "].phase";
        if (phase < 0 || phase >= m.cycle_length) throw_validation(field, "phase out of range");
        if (seen[static_cast<std::size_t>(phase)]++) {
            throw_validation(field, "duplicate phase " + std::to_string(phase));
        }
    }
    for (int p = 0; p < m.cycle_length; ++p) {
        if (!seen[static_cast<std::size_t>(p)]) {
            throw_validation("reference_frames", "phase " + std::to_string(p) + " not covered");
        }
    }
    for (std::size_t i = 0; i < m.navigation_frames.size(); ++i) {
        const int phase = m.navigation_frames[i].phase;
        if (phase < 0 || phase >= m.cycle_length) {
            throw_validation("navigation_frames[" + std::to_string(i) + "].phase", "phase out of range");
        }
    }
    if (m.ground_truth) {
        if (m.ground_truth->voi_path.empty()) throw_validation("ground_truth.voi_path", "must not be empty");
        if (m.ground_truth->tip_presence.size() != m.navigation_frames.size()) {
            throw_validation("ground_truth.tip_presence",
                             "has " + std::to_string(m.ground_truth->tip_presence.size()) + " entries for " +
                                 std::to_string(m.navigation_frames.size()) + " navigation frames");
        }
    }
}

namespace {

std::vector<FrameRef> frames_from_json(const json& j, const std::string& key, int cycle_length, bool phase_required) {
    std::vector<FrameRef> out;
    if (!j.contains(key)) {
        if (phase_required) throw_validation(key, "missing required field");
        return out;
    }
    const json& arr = j.at(key);
    if (!arr.is_array()) throw_validation(key, "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string prefix = key + "[" + std::to_string(i) + "]";
        FrameRef f;
        f.path = detail::require<std::string>(arr[i], "path", prefix);
        if (phase_required) {
            f.phase = detail::require<int>(arr[i], "phase", prefix);
        } else {
            f.phase = detail::value_or<int>(arr[i], "phase", static_cast<int>(i) % std::max(cycle_length, 1), prefix);
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

SequenceManifest manifest_from_json(const json& j) {
    if (!j.is_object()) throw_validation("<root>", "manifest must be a JSON object");
    SequenceManifest m;
    m.pixel_spacing_mm = detail::require<double>(j, "pixel_spacing_mm");
    m.frame_interval_s = detail::require<double>(j, "frame_interval_s");
    m.cycle_length = detail::require<int>(j, "cycle_length");
    m.reference_frames = frames_from_json(j, "reference_frames", m.cycle_length, true);
    m.navigation_frames = frames_from_json(j, "navigation_frames", m.cycle_length, false);
    if (j.contains("ground_truth") && !j.at("ground_truth").is_null()) {
        const json& g = j.at("ground_truth");
        GroundTruthRef gt;
        gt.voi_path = detail::require<std::string>(g, "voi_path", "ground_truth");
        gt.tip_presence = detail::require<std::vector<bool>>(g, "tip_presence", "ground_truth");
        m.ground_truth = std::move(gt);
    }
    validate_manifest(m);
    return m;
}

json manifest_to_json(const SequenceManifest& m) {
    json j;
    j["pixel_spacing_mm"] = m.pixel_spacing_mm;
    j["frame_interval_s"] = m.frame_interval_s;
    j["cycle_length"] = m.cycle_length;
    auto frames = [](const std::vector<FrameRef>& fs) {
        json arr = json::array();
        for (const auto& f : fs) arr.push_back({{"path", f.path}, {"phase", f.phase}});
        return arr;
    };
    j["reference_frames"] = frames(m.reference_frames);
    j["navigation_frames"] = frames(m.navigation_frames);
    if (m.ground_truth) {
        j["ground_truth"] = {{"voi_path", m.ground_truth->voi_path}, {"tip_presence", m.ground_truth->tip_presence}};
    }
    return j;
}

SequenceManifest read_manifest(const std::filesystem::path& path, bool check_files) {
    SequenceManifest m = manifest_from_json(detail::read_json_file(path));
    m.base_dir = path.parent_path();
    if (!check_files) return m;

    std::optional<std::pair<int, int>> dims;
    auto check = [&](const FrameRef& f, const std::string& field) {
        const auto full = m.resolve(f.path);
        if (!std::filesystem::exists(full)) throw Error(ErrorKind::Io, field + ": missing image " + full.string());
        const PgmHeader h = read_pgm_header(full);
        if (!dims) {
            dims = {h.width, h.height};
        } else if (dims->first != h.width || dims->second != h.height) {
            throw_validation(field, "image " + full.string() + " is " + std::to_string(h.width) + "x" +
                                        std::to_string(h.height) + ", expected " + std::to_string(dims->first) +
                                        "x" + std::to_string(dims->second));
        }
    };
    for (std::size_t i = 0; i < m.reference_frames.size(); ++i) {
        check(m.reference_frames[i], "reference_frames[" + std::to_string(i) + "].path");
    }
    for (std::size_t i = 0; i < m.navigation_frames.size(); ++i) {
        check(m.navigation_frames[i], "navigation_frames[" + std::to_string(i) + "].path");
    }
    return m;
}

void write_manifest(const SequenceManifest& m, const std::filesystem::path& path) {
    detail::write_json_file(manifest_to_json(m), path);
}

}  // namespace voidd
