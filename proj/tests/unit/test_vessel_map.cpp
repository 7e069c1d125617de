#include <doctest.h>

#include <cmath>

#include "voidd/error.hpp"
#include "voidd/vessel_map.hpp"

using namespace voidd;

namespace {

GrayImage dark_line(int w, int h, int row, int half_width, std::uint16_t bg, std::uint16_t fg) {
    GrayImage img(w, h, 8, bg);
    for (int y = row - half_width; y <= row + half_width; ++y) {
        for (int x = 0; x < w; ++x) img.at(x, y) = fg;
    }
    return img;
}

GrayImage transpose(const GrayImage& img) {
    GrayImage out(img.height, img.width, img.bit_depth);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) out.at(y, x) = img.at(x, y);
    }
    return out;
}

// Y shape: trunk from (10,40) to (40,40), branches to (70,15) and (70,65).
BinaryMask y_mask() {
    BinaryMask m(80, 80);
    for (int x = 10; x <= 40; ++x) m.set(x, 40);
    for (int k = 1; k <= 25; ++k) {
        m.set(40 + k, 40 - k);
        m.set(40 + k, 40 + k);
    }
    return m;
}

}  // namespace

TEST_CASE("vesselness responds to dark lines only") {
    const GrayImage dark = dark_line(60, 41, 20, 2, 200, 80);
    const VesselnessMap m = vesselness(dark, {1.5, 2.5});
    CHECK(m.response.at(30, 20) > 1.0);
    CHECK(m.response.at(30, 20) > 10.0 * m.response.at(30, 5));
    CHECK(std::abs(m.normal_y.at(30, 20)) > 0.99);

    const GrayImage bright = dark_line(60, 41, 20, 2, 80, 200);
    const VesselnessMap b = vesselness(bright, {1.5, 2.5});
    CHECK(b.response.at(30, 20) == 0.0);
}

TEST_CASE("vesselness is invariant to intensity offset and transposition") {
    const GrayImage a = dark_line(50, 31, 15, 1, 180, 60);
    const GrayImage shifted = dark_line(50, 31, 15, 1, 200, 80);
    const VesselnessMap ma = vesselness(a, {1.5});
    const VesselnessMap ms = vesselness(shifted, {1.5});
    const VesselnessMap mt = vesselness(transpose(a), {1.5});
    for (int y = 0; y < 31; ++y) {
        for (int x = 0; x < 50; ++x) {
            CHECK(ma.response.at(x, y) == doctest::Approx(ms.response.at(x, y)).epsilon(1e-9));
            CHECK(ma.response.at(x, y) == doctest::Approx(mt.response.at(y, x)).epsilon(1e-9));
        }
    }
}

TEST_CASE("scales outside the supported range are rejected") {
    const GrayImage img(20, 20, 8, 100);
    CHECK_THROWS_AS(vesselness(img, {0.2}), Error);
    CHECK_THROWS_AS(vesselness(img, {9.0}), Error);
    CHECK_THROWS_AS(vesselness(img, {}), Error);
}

TEST_CASE("nms keeps the ridge centre") {
    const GrayImage img = dark_line(60, 41, 20, 2, 200, 80);
    const VesselnessMap m = vesselness(img, {1.5, 2.5});
    const BinaryMask c = nms_hysteresis(m, 0.3, 1.0);
    int on_centre = 0;
    int off_centre = 0;
    for (int x = 10; x < 50; ++x) {
        for (int y = 0; y < 41; ++y) {
            if (c.get(x, y)) (y == 20 ? on_centre : off_centre) += 1;
        }
    }
    CHECK(on_centre == 40);
    CHECK(off_centre == 0);
}

TEST_CASE("y-shaped centerline gives one bifurcation and three branches") {
    const VesselGraph g = build_graph(y_mask(), 0);
    g.validate();
    int bif = 0;
    int ends = 0;
    for (const auto& n : g.nodes) (n.kind == NodeKind::Bifurcation ? bif : ends) += 1;
    CHECK(bif == 1);
    CHECK(ends == 3);
    CHECK(g.edges.size() == 3);
    for (const int d : g.degrees()) CHECK((d == 1 || d == 3));
}

TEST_CASE("geodesic on the y graph") {
    const VesselGraph g = build_graph(y_mask(), 0);
    const auto leaf = [&](Point2 p) {
        for (const auto& e : g.edges) {
            for (const int n : {e.node_a, e.node_b}) {
                if (g.nodes[n].kind == NodeKind::Endpoint && distance(g.nodes[n].pos, p) < 3.0) {
                    return GraphPosition{e.id, n == e.node_a ? 0.0 : e.length};
                }
            }
        }
        FAIL("endpoint not found");
        return GraphPosition{};
    };
    const GraphPosition trunk = leaf({10, 40});
    const GraphPosition upper = leaf({65, 15});
    const GraphPosition lower = leaf({65, 65});
    const double expected = 30.0 + 25.0 * std::sqrt(2.0);
    CHECK(*geodesic(g, trunk, upper) == doctest::Approx(expected).epsilon(0.05));
    CHECK(*geodesic(g, upper, lower) == doctest::Approx(2.0 * 25.0 * std::sqrt(2.0)).epsilon(0.05));
    CHECK(*geodesic(g, trunk, trunk) == 0.0);
    const GeodesicIndex index(g);
    CHECK(*index.distance(trunk, upper) == doctest::Approx(*geodesic(g, trunk, upper)));
    const GraphPosition mid{trunk.edge_id, 5.0};
    CHECK(*geodesic(g, trunk, mid) == doctest::Approx(5.0));
}

TEST_CASE("disconnected positions have no geodesic") {
    BinaryMask m(60, 30);
    for (int x = 5; x < 25; ++x) m.set(x, 10);
    for (int x = 35; x < 55; ++x) m.set(x, 20);
    const VesselGraph g = build_graph(m, 0);
    REQUIRE(g.edges.size() == 2);
    CHECK_FALSE(geodesic(g, {0, 0.0}, {1, 0.0}).has_value());
}
