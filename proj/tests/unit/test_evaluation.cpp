#include <doctest.h>

#include "voidd/error.hpp"
#include "voidd/evaluation.hpp"

using namespace voidd;

TEST_CASE("tre analytic cases") {
    const Polyline gt({{0, 0}, {100, 0}});
    CHECK(tre(gt, gt, 0.2) == 0.0);
    const Polyline bent({{3, 7}, {41, 19}, {60, -12}, {97, 5}});
    CHECK(tre(bent, bent, 0.2) < 1e-12);
    const Polyline shifted({{0, 1.5}, {100, 1.5}});
    CHECK(tre(shifted, gt, 0.2) == doctest::Approx(0.300).epsilon(1e-9));
    const Polyline partial({{20, 2}, {40, 2}});
    CHECK(tre(partial, gt, 0.5) == doctest::Approx(1.0));
    CHECK_THROWS_AS(tre(gt, gt, 0.2, 1), Error);
}

TEST_CASE("tre averages over equispaced samples") {
    // Tilted segment from (0,0) to (10,4) against the x axis: mean |y| is 2 px.
    const Polyline x({{0, 0}, {10, 4}});
    const Polyline gt({{-5, 0}, {20, 0}});
    CHECK(tre(x, gt, 1.0, 5) == doctest::Approx(2.0));
}

TEST_CASE("frame classification") {
    CHECK(classify_frame(true, true, 0.3) == DetectionClass::Correct);
    CHECK(classify_frame(true, true, 0.4999999) == DetectionClass::Correct);
    CHECK(classify_frame(true, true, 0.5) == DetectionClass::Wrong);
    CHECK(classify_frame(false, true, std::nullopt) == DetectionClass::Missed);
    CHECK(classify_frame(true, false, std::nullopt) == DetectionClass::False);
    CHECK(classify_frame(false, false, std::nullopt) == DetectionClass::TrueNegative);
    CHECK_THROWS_AS(classify_frame(true, true, std::nullopt), Error);
}

TEST_CASE("evaluate counts outcomes and per-phase truth") {
    GroundTruth gt{Polyline({{0, 0}, {100, 0}}), {}, {true, true, true, false}, 0.2};
    gt.voi_by_phase.emplace(1, Polyline({{0, 10}, {100, 10}}));
    gt.validate();

    DetectionSequence d;
    d.frame_count = 4;
    d.phases = {0, 1, 0, 0};
    d.voi.emplace(0, Polyline({{10, 1}, {50, 1}}));
    d.voi.emplace(1, Polyline({{10, 10}, {50, 10}}));
    d.voi.emplace(3, Polyline({{10, 0}, {50, 0}}));
    const EvalReport r = evaluate(d, gt);
    CHECK(r.total() == 4);
    CHECK(r.count(DetectionClass::Correct) == 2);
    CHECK(r.count(DetectionClass::Missed) == 1);
    CHECK(r.count(DetectionClass::False) == 1);
    CHECK(r.frames_with_tip() == 3);
    CHECK(r.frames_without_tip() == 1);
    CHECK(*r.mean_tre_mm() == doctest::Approx(0.1));
    CHECK(r.rate(DetectionClass::Correct) == doctest::Approx(0.5));

    const auto j = report_to_json(r);
    CHECK(j.at("per_frame").size() == 4);
    CHECK(j.at("table").contains("false_detection_pct"));

    d.frame_count = 5;
    d.phases.push_back(0);
    CHECK_THROWS_AS(evaluate(d, gt), Error);
}

TEST_CASE("ground truth json round trip") {
    GroundTruth gt{Polyline({{0, 0}, {3, 4}}), {}, {true, false}, 0.25};
    gt.voi_by_phase.emplace(0, gt.voi);
    const GroundTruth back = ground_truth_from_json(ground_truth_to_json(gt));
    CHECK(back.voi == gt.voi);
    CHECK(back.tip_present == gt.tip_present);
    CHECK(back.pixel_spacing_mm == gt.pixel_spacing_mm);
    auto j = ground_truth_to_json(gt);
    j["extra"] = 1;
    CHECK_THROWS_AS(ground_truth_from_json(j), Error);
}
