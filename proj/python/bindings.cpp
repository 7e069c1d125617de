#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "voidd/config.hpp"
#include "voidd/error.hpp"
#include "voidd/evaluation.hpp"
#include "voidd/image_io.hpp"
#include "voidd/json_util.hpp"
#include "voidd/manifest.hpp"
#include "voidd/matching.hpp"
#include "voidd/min_tree.hpp"
#include "voidd/pipeline.hpp"
#include "voidd/serialization.hpp"
#include "voidd/skeleton.hpp"
#include "voidd/synth.hpp"
#include "voidd/tip_candidates.hpp"
#include "voidd/vessel_map.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using U16Array = py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

// bit_depth 0 picks 8 when every sample fits, else 16.
voidd::GrayImage to_image(const U16Array& a, int bit_depth = 0) {
    if (a.ndim() != 2) throw voidd::Error(voidd::ErrorKind::InvalidArgument, "image must be a 2-D array");
    if (bit_depth == 0) {
        const bool fits = std::all_of(a.data(), a.data() + a.size(), [](std::uint16_t v) { return v <= 255; });
        bit_depth = fits ? 8 : 16;
    }
    voidd::GrayImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), bit_depth);
    std::copy(a.data(), a.data() + a.size(), img.pixels.begin());
    img.validate();
    return img;
}

U16Array from_image(const voidd::GrayImage& img) {
    U16Array out({img.height, img.width});
    std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
    return out;
}

F64Array from_real(const voidd::RealImage& img) {
    F64Array out({img.height, img.width});
    std::copy(img.values.begin(), img.values.end(), out.mutable_data());
    return out;
}

voidd::BinaryMask to_mask(const U8Array& a) {
    if (a.ndim() != 2) throw voidd::Error(voidd::ErrorKind::InvalidArgument, "mask must be a 2-D array");
    voidd::BinaryMask m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    for (py::ssize_t i = 0; i < a.size(); ++i) m.bits[i] = a.data()[i] != 0;
    return m;
}

U8Array from_mask(const voidd::BinaryMask& m) {
    U8Array out({m.height, m.width});
    std::copy(m.bits.begin(), m.bits.end(), out.mutable_data());
    return out;
}

std::vector<voidd::Point2> to_points(const F64Array& a) {
    if (a.ndim() != 2 || a.shape(1) != 2) {
        throw voidd::Error(voidd::ErrorKind::InvalidArgument, "points must have shape (n, 2)");
    }
    std::vector<voidd::Point2> pts(a.shape(0));
    for (py::ssize_t i = 0; i < a.shape(0); ++i) pts[i] = {a.at(i, 0), a.at(i, 1)};
    return pts;
}

F64Array from_points(std::span<const voidd::Point2> pts) {
    F64Array out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        w(i, 0) = pts[i].x;
        w(i, 1) = pts[i].y;
    }
    return out;
}

voidd::PipelineConfig parse_config(const std::string& config_json) {
    return config_json.empty() ? voidd::PipelineConfig{} : voidd::config_from_json(json::parse(config_json));
}

py::dict min_tree_dict(const voidd::MinTree& tree) {
    const std::size_t n = tree.node_count();
    py::array_t<std::int32_t> parent(n);
    py::array_t<std::uint16_t> level(n);
    py::array_t<std::int64_t> area(n);
    py::array_t<double> attribute(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = static_cast<voidd::MinTree::NodeId>(i);
        parent.mutable_data()[i] = tree.parent(id);
        level.mutable_data()[i] = tree.level(id);
        area.mutable_data()[i] = tree.area(id);
        attribute.mutable_data()[i] = tree.attribute(id);
    }
    py::array_t<std::int32_t> pixel_node({tree.height(), tree.width()});
    std::copy(tree.pixel_nodes().begin(), tree.pixel_nodes().end(), pixel_node.mutable_data());
    py::dict d;
    d["parent"] = parent;
    d["level"] = level;
    d["area"] = area;
    d["attribute"] = attribute;
    d["pixel_node"] = pixel_node;
    d["root"] = tree.root();
    return d;
}

std::string run_all(const fs::path& manifest_path, const fs::path& out_dir, const std::string& config_json, int jobs) {
    const auto cfg = parse_config(config_json);
    const auto m = voidd::read_manifest(manifest_path);
    fs::create_directories(out_dir);
    voidd::write_graphs(voidd::extract_vessels(m, cfg, jobs), out_dir / "graphs");
    voidd::write_tips(voidd::extract_tips(m, cfg, jobs), out_dir / "tips");
    const auto graphs = voidd::read_graphs(out_dir / "graphs", m.cycle_length);
    const auto tips = voidd::read_tips(out_dir / "tips", static_cast<int>(m.navigation_frames.size()));
    const auto tracked = voidd::track_sequence(m, tips, graphs, cfg, jobs);
    const json result = voidd::result_to_json(tracked.result, m, cfg);
    voidd::detail::write_json_file(result, out_dir / "result.json");
    if (!m.ground_truth) return result.dump();
    const auto gt = voidd::read_ground_truth(m.resolve(m.ground_truth->voi_path));
    const auto report = voidd::evaluate(voidd::detections_from_result_json(result), gt, cfg.evaluation);
    const json report_json = voidd::report_to_json(report);
    voidd::detail::write_json_file(report_json, out_dir / "report.json");
    return report_json.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Vessel-of-intervention detection from guidewire tips";

    py::register_exception<voidd::Error>(m, "VoiddError", PyExc_RuntimeError);

    m.def("read_pgm", [](const fs::path& p) { return from_image(voidd::read_pgm(p)); }, py::arg("path"),
          "Binary PGM as a uint16 array of shape (height, width).");
    m.def(
        "write_pgm",
        [](const U16Array& a, const fs::path& p, int bit_depth) { voidd::write_pgm(to_image(a, bit_depth), p); },
        py::arg("image"), py::arg("path"), py::arg("bit_depth") = 0);

    m.def(
        "min_tree",
        [](const U16Array& a, int connectivity) {
            if (connectivity != 4 && connectivity != 8) {
                throw voidd::Error(voidd::ErrorKind::InvalidArgument, "connectivity must be 4 or 8");
            }
            const auto tree = voidd::MinTree::build(to_image(a), static_cast<voidd::Connectivity>(connectivity));
            return min_tree_dict(tree);
        },
        py::arg("image"), py::arg("connectivity") = 4,
        "Arrays parent, level, area, attribute per node and pixel_node per pixel.");

    m.def(
        "elongation",
        [](const U8Array& mask) {
            const auto bm = to_mask(mask);
            voidd::ComponentMoments mom;
            for (int y = 0; y < bm.height; ++y) {
                for (int x = 0; x < bm.width; ++x) {
                    if (bm.get(x, y)) mom.add_pixel(x, y);
                }
            }
            return voidd::elongation(mom);
        },
        py::arg("mask"));

    m.def(
        "extract_tip_candidates",
        [](const U16Array& a, const std::string& config_json) {
            const auto cfg = parse_config(config_json);
            py::list out;
            for (const auto& c : voidd::extract_tip_candidates(to_image(a), cfg.tip, 0)) {
                out.append(py::make_tuple(from_points(c.curve.points()), c.score));
            }
            return out;
        },
        py::arg("image"), py::arg("config_json") = "", "List of (points, score), best first.");

    m.def(
        "vesselness",
        [](const U16Array& a, const std::vector<double>& scales) {
            const auto map = voidd::vesselness(to_image(a), scales);
            return py::make_tuple(from_real(map.response), from_real(map.normal_x), from_real(map.normal_y));
        },
        py::arg("image"), py::arg("scales") = std::vector<double>{1.5, 2.5, 4.0});

    m.def(
        "extract_vessel_graph",
        [](const U16Array& a, int phase, const std::string& config_json) {
            const auto cfg = parse_config(config_json);
            return voidd::graph_to_json(voidd::extract_vessel_graph(to_image(a), phase, cfg.vessel)).dump();
        },
        py::arg("image"), py::arg("phase") = 0, py::arg("config_json") = "", "Graph as a JSON string.");

    m.def("thin", [](const U8Array& mask) { return from_mask(voidd::thin(to_mask(mask))); }, py::arg("mask"));

    m.def(
        "discrete_frechet",
        [](const F64Array& p, const F64Array& q) { return voidd::discrete_frechet(to_points(p), to_points(q)); },
        py::arg("p"), py::arg("q"));

    m.def(
        "tre",
        [](const F64Array& x, const F64Array& gt, double spacing_mm, std::size_t n) {
            return voidd::tre(voidd::Polyline(to_points(x)), voidd::Polyline(to_points(gt)), spacing_mm, n);
        },
        py::arg("x"), py::arg("gt"), py::arg("spacing_mm"), py::arg("n") = 64);

    m.def(
        "synth",
        [](const fs::path& out_dir, bool tip_free, const std::string& spec_json) {
            const auto spec = !spec_json.empty() ? voidd::scene_from_json(json::parse(spec_json))
                              : tip_free         ? voidd::tip_free_scene()
                                                 : voidd::default_scene();
            return voidd::generate(spec, out_dir).manifest_path;
        },
        py::arg("out_dir"), py::arg("tip_free") = false, py::arg("spec_json") = "",
        "Writes a synthetic sequence and returns the manifest path.");

    m.def(
        "default_scene",
        [](bool tip_free) {
            return voidd::scene_to_json(tip_free ? voidd::tip_free_scene() : voidd::default_scene()).dump();
        },
        py::arg("tip_free") = false);

    m.def("default_config", [] { return voidd::config_to_json(voidd::PipelineConfig{}).dump(); });

    m.def("run_all", &run_all, py::arg("manifest"), py::arg("out_dir"), py::arg("config_json") = "",
          py::arg("jobs") = 0, py::call_guard<py::gil_scoped_release>(),
          "Every stage from manifest to report; returns the report (or result) as a JSON string.");
}
