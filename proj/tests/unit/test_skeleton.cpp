#include <doctest.h>

#include <random>

#include "voidd/error.hpp"
#include "voidd/skeleton.hpp"
#include "../support/oracles.hpp"

using namespace voidd;

namespace {

BinaryMask rect(int w, int h, int x0, int y0, int x1, int y1) {
    BinaryMask m(w, h);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) m.set(x, y);
    }
    return m;
}

bool subset(const BinaryMask& a, const BinaryMask& b) {
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        if (a.bits[i] && !b.bits[i]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("simple point table") {
    CHECK_FALSE(is_simple_configuration(0));        // isolated pixel
    CHECK(is_simple_configuration(0b00000001));     // single E neighbour
    CHECK_FALSE(is_simple_configuration(0b00010001));  // E and W only: bridge
    CHECK_FALSE(is_simple_configuration(0xFF));     // interior
    CHECK(is_simple_configuration(0b00000111));     // E, NE, N
}

TEST_CASE("thin bar becomes a one pixel line") {
    const BinaryMask bar = rect(30, 11, 3, 3, 26, 7);
    const BinaryMask skel = thin(bar);
    CHECK(subset(skel, bar));
    CHECK(oracle::foreground_components(skel) == 1);
    for (int x = 0; x < 30; ++x) {
        int column = 0;
        for (int y = 0; y < 11; ++y) column += skel.get(x, y);
        CHECK(column <= 1);
    }
    const Polyline curve = skeleton_to_curve(skel);
    CHECK(polyline_length(curve) > 15.0);
    CHECK(curve.front().x < curve.back().x);
}

TEST_CASE("ring keeps its hole") {
    BinaryMask ring(21, 21);
    for (int y = 0; y < 21; ++y) {
        for (int x = 0; x < 21; ++x) {
            const int d2 = (x - 10) * (x - 10) + (y - 10) * (y - 10);
            if (d2 <= 64 && d2 >= 16) ring.set(x, y);
        }
    }
    const BinaryMask skel = thin(ring);
    CHECK(oracle::holes(skel) == 1);
    CHECK(oracle::foreground_components(skel) == 1);
    CHECK_THROWS_AS(skeleton_to_curve(skel), Error);
}

TEST_CASE("thinning preserves topology on random blobs and is idempotent") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const BinaryMask blob = oracle::random_blob(rng, 40);
        const BinaryMask skel = thin(blob);
        CHECK(subset(skel, blob));
        CHECK(oracle::foreground_components(skel) == oracle::foreground_components(blob));
        CHECK(oracle::holes(skel) == oracle::holes(blob));
        CHECK(thin(skel) == skel);
    }
}

TEST_CASE("single pixel skeleton is degenerate") {
    BinaryMask m(5, 5);
    m.set(2, 2);
    try {
        skeleton_to_curve(m);
        FAIL("expected an exception");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateSkeleton);
    }
}

TEST_CASE("short spurs are ignored by the centerline") {
    BinaryMask m(40, 10);
    for (int x = 2; x < 38; ++x) m.set(x, 5);
    m.set(20, 4);
    m.set(20, 3);
    const Polyline curve = skeleton_to_curve(m);
    CHECK(curve.front() == Point2{2, 5});
    CHECK(curve.back() == Point2{37, 5});
    CHECK(polyline_length(curve) == doctest::Approx(35.0));
}
