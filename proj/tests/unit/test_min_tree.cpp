#include <doctest.h>

#include <random>

#include "voidd/min_tree.hpp"
#include "voidd/tip_candidates.hpp"
#include "../support/oracles.hpp"

using namespace voidd;

TEST_CASE("1x3 image tree") {
    GrayImage img(3, 1);
    img.pixels = {3, 1, 2};
    const MinTree tree = MinTree::build(img);
    REQUIRE(tree.node_count() == 3);
    const auto leaf = tree.pixel_node(1);
    CHECK(tree.level(leaf) == 1);
    CHECK(tree.area(leaf) == 1);
    const auto mid = tree.parent(leaf);
    CHECK(tree.level(mid) == 2);
    CHECK(tree.area(mid) == 2);
    CHECK(tree.parent(mid) == tree.root());
    CHECK(tree.area(tree.root()) == 3);
    CHECK(tree.parent(tree.root()) == tree.root());
}

TEST_CASE("constant image is a single root") {
    const MinTree tree = MinTree::build(GrayImage(6, 4, 8, 9));
    CHECK(tree.node_count() == 1);
    CHECK(tree.area(tree.root()) == 24);
}

TEST_CASE("min tree equals level-set oracle on random images") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const GrayImage img = oracle::random_image(rng, 8, 8, 4);
        for (const bool eight : {false, true}) {
            const MinTree tree = MinTree::build(img, eight ? Connectivity::Eight : Connectivity::Four);
            const std::string diff = oracle::compare_min_tree(tree, img, eight);
            CHECK_MESSAGE(diff.empty(), diff);
        }
    }
}

TEST_CASE("moments accumulate over descendants") {
    std::mt19937_64 rng(2);
    const GrayImage img = oracle::random_image(rng, 8, 8, 5);
    const MinTree tree = MinTree::build(img);
    for (std::size_t n = 0; n < tree.node_count(); ++n) {
        ComponentMoments direct;
        const BinaryMask mask = tree.component_mask(static_cast<MinTree::NodeId>(n));
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 8; ++x) {
                if (mask.get(x, y)) direct.add_pixel(x, y);
            }
        }
        CHECK(direct == tree.moments(static_cast<MinTree::NodeId>(n)));
    }
}

TEST_CASE("elongation calibration") {
    std::vector<std::pair<int, int>> disk;
    ComponentMoments disk_moments;
    for (int y = -15; y <= 15; ++y) {
        for (int x = -15; x <= 15; ++x) {
            if (x * x + y * y <= 225) {
                disk.emplace_back(x, y);
                disk_moments.add_pixel(x, y);
            }
        }
    }
    CHECK(elongation(disk_moments) == doctest::Approx(oracle::covariance_elongation(disk)));
    CHECK(elongation(disk_moments) == doctest::Approx(1.0).epsilon(0.10));

    std::vector<std::pair<int, int>> segment;
    ComponentMoments seg_moments;
    for (int x = 0; x < 20; ++x) {
        segment.emplace_back(x, 0);
        seg_moments.add_pixel(x, 0);
    }
    CHECK(major_axis_variance(seg_moments) == doctest::Approx(33.25));
    CHECK(elongation(seg_moments) == doctest::Approx(oracle::covariance_elongation(segment)));
    CHECK(elongation(seg_moments) == doctest::Approx(20.9).epsilon(0.01));

    ComponentMoments two;
    two.add_pixel(0, 0);
    two.add_pixel(1, 0);
    CHECK(elongation(two) == 0.0);
}

TEST_CASE("elongation is translation and quarter-turn invariant") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        ComponentMoments a;
        ComponentMoments b;
        ComponentMoments c;
        const int n = 3 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            const int x = static_cast<int>(rng() % 30);
            const int y = static_cast<int>(rng() % 30);
            a.add_pixel(x, y);
            b.add_pixel(x + 100, y - 7);
            c.add_pixel(-y, x);
        }
        CHECK(elongation(a) == elongation(b));
        CHECK(elongation(a) == doctest::Approx(elongation(c)).epsilon(1e-12));
    }
}

namespace {

GrayImage stroke_scene(bool with_catheter) {
    GrayImage img(320, 80, 8, 200);
    for (int x = 20; x < 80; ++x) {
        const int y = 30 + (x - 20) / 6;
        img.at(x, y) = 120;
        img.at(x, y + 1) = 120;
    }
    if (with_catheter) {
        for (int x = 10; x < 310; ++x) img.at(x, 62) = 110;
    }
    return img;
}

}  // namespace

TEST_CASE("thin dark curve is the single tip component") {
    TipSegConfig cfg;
    cfg.presmooth_sigma = 0.0;
    const GrayImage img = stroke_scene(false);
    const MinTree tree = MinTree::build(img, cfg.connectivity);
    const auto comps = select_tip_components(tree, cfg);
    REQUIRE(comps.size() == 1);
    int overlap = 0;
    int stroke = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const bool truth = img.at(x, y) == 120;
            stroke += truth;
            overlap += truth && comps[0].mask.get(x, y);
        }
    }
    const double dice = 2.0 * overlap / (stroke + static_cast<double>(comps[0].mask.count()));
    CHECK(dice > 0.8);
}

TEST_CASE("over-elongated object is excluded") {
    TipSegConfig cfg;
    cfg.presmooth_sigma = 0.0;
    const GrayImage img = stroke_scene(true);
    ComponentMoments line;
    for (int x = 10; x < 310; ++x) line.add_pixel(x, 62);
    REQUIRE(elongation(line) > cfg.t_max);
    const MinTree tree = MinTree::build(img, cfg.connectivity);
    const auto comps = select_tip_components(tree, cfg);
    REQUIRE(comps.size() == 1);
    CHECK_FALSE(comps[0].mask.get(60, 62));
}

TEST_CASE("blank image has no candidates") {
    TipSegConfig cfg;
    CHECK(extract_tip_candidates(GrayImage(40, 40, 8, 128), cfg, 0).empty());
}

TEST_CASE("selected components are never nested") {
    std::mt19937_64 rng(21);
    TipSegConfig cfg;
    cfg.a_min = 3;
    cfg.t_min = 1.5;
    cfg.max_candidates = 1000;
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage img = oracle::random_image(rng, 16, 16, 6);
        const MinTree tree = MinTree::build(img);
        const auto nodes = select_tip_nodes(tree, cfg);
        for (const auto a : nodes) {
            for (const auto b : nodes) {
                if (a != b) CHECK_FALSE(tree.is_ancestor(a, b));
            }
        }
    }
}
