#include <doctest.h>

#include "voidd/error.hpp"
#include "voidd/synth.hpp"

using namespace voidd;

namespace {

SceneSpec small_scene() {
    SceneSpec s = default_scene();
    s.n_navigation_frames = 4;
    s.cycle_length = 4;
    return s;
}

}  // namespace

TEST_CASE("rendering is a pure function of the scene") {
    const SceneSpec s = small_scene();
    const SceneRender a = render_scene(s);
    const SceneRender b = render_scene(s);
    CHECK(a.reference == b.reference);
    CHECK(a.navigation == b.navigation);
    REQUIRE(a.reference.size() == 4);
    REQUIRE(a.navigation.size() == 4);
    CHECK(a.navigation_phase == std::vector<int>{0, 1, 2, 3});

    SceneSpec other = s;
    other.seed = 8;
    CHECK_FALSE(render_scene(other).navigation == a.navigation);
}

TEST_CASE("tip-free scene has no tip") {
    SceneSpec s = tip_free_scene();
    s.n_navigation_frames = 3;
    const SceneRender r = render_scene(s);
    for (const auto& t : r.true_tips) CHECK_FALSE(t.has_value());
    for (const bool present : r.ground_truth.tip_present) CHECK_FALSE(present);
}

TEST_CASE("phase zero warp is the identity") {
    const SceneSpec s = default_scene();
    const Point2 p{123.0, 321.0};
    CHECK(warp_point(s, 0, p) == p);
    CHECK(distance(warp_point(s, 3, p), p) > 0.1);
}

TEST_CASE("navigated path is dense and lies in the image") {
    const SceneSpec s = default_scene();
    const Polyline path = navigated_path(s);
    CHECK(polyline_length(path) > 150.0);
    for (const auto& p : path.points()) {
        CHECK(p.x >= 0.0);
        CHECK(p.y >= 0.0);
        CHECK(p.x < s.width);
        CHECK(p.y < s.height);
    }
}

TEST_CASE("true tip follows the guidewire speed") {
    const SceneSpec s = small_scene();
    const SceneRender r = render_scene(s);
    REQUIRE(r.true_tips[0].has_value());
    CHECK(polyline_length(*r.true_tips[0]) == doctest::Approx(s.guidewire.tip_length_px).epsilon(0.1));
}

TEST_CASE("scene json round trip and validation") {
    const SceneSpec s = default_scene();
    CHECK(scene_to_json(scene_from_json(scene_to_json(s))) == scene_to_json(s));
    SceneSpec bad = s;
    bad.guidewire.branch = 99;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = s;
    bad.dropout_fraction = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
}
