#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_support.hpp"

using namespace detmode;
using Catch::Approx;

namespace {

constexpr double kExpMinus2 = 0.13533528323661270; // e^{-2}

} // namespace

TEST_CASE("multi_measurement_plan") {
    const Grid g(64, 64, 8.0, 8.0);
    ModeBasis pool = testsupport::polished_hg(2, 1.0, g); // 6 modes
    const SampledMode beam = pool[0];
    PixelLayout lr = half_x(g, {-1.0, 1.0});
    PixelLayout tb = half_y(g, {-1.0, 1.0});
    PixelLayout checker = quadrants(g, {1.0, -1.0, 1.0, -1.0});

    SECTION("left/right and top/bottom splits served by two squeezers") {
        MultiMeasurementPlan plan = multi_measurement_plan(beam, {lr, tb}, 1.0, pool);
        CHECK(plan.subspace_rank == 2);
        CHECK_FALSE(plan.dependent_layouts);
        CHECK(plan.degree == 3);
        REQUIRE(plan.reports.size() == 2);
        for (const auto& rep : plan.reports) {
            CHECK(rep.sql_ratio <= kExpMinus2 + 1e-6);
            CHECK(rep.detection_mode.is_difference);
            CHECK(std::abs(rep.mean) < 1e-6 * rep.shot_noise);
        }
    }

    SECTION("a third independent difference costs a third squeezer") {
        MultiMeasurementPlan plan =
            multi_measurement_plan(beam, {lr, tb, checker}, 0.8, pool);
        CHECK(plan.subspace_rank == 3);
        CHECK(plan.degree == 4);
        const double bound = std::exp(-1.6) + 1e-6;
        for (const auto& rep : plan.reports)
            CHECK(rep.sql_ratio <= bound);
    }

    SECTION("single layout matches squeezing the detection mode by hand") {
        MultiMeasurementPlan plan = multi_measurement_plan(beam, {lr}, 1.0, pool);
        REQUIRE(plan.reports.size() == 1);
        CHECK(plan.reports[0].sql_ratio == Approx(kExpMinus2).epsilon(1e-9));

        DetectionMode dm = detection_mode(beam, lr);
        ModeBasis basis = gram_schmidt({beam, dm.w1});
        GaussianState s = make_state(2, {{0, cplx(100.0, 0.0)}}, {{1, 1.0, 0.0}});
        MeasurementReport manual = variance_direct(s, basis, lr);
        CHECK(plan.reports[0].variance == Approx(manual.variance).epsilon(1e-9));
    }

    SECTION("duplicate layouts collapse to one squeezer") {
        MultiMeasurementPlan plan = multi_measurement_plan(beam, {lr, lr}, 1.0, pool);
        CHECK(plan.subspace_rank == 1);
        CHECK(plan.dependent_layouts);
        CHECK(plan.degree == 2);
        for (const auto& rep : plan.reports)
            CHECK(rep.sql_ratio <= kExpMinus2 + 1e-6);
    }

    SECTION("r = 0 leaves every measurement at shot noise") {
        MultiMeasurementPlan plan = multi_measurement_plan(beam, {lr, tb}, 0.0, pool);
        for (const auto& rep : plan.reports)
            CHECK(rep.sql_ratio == Approx(1.0).margin(1e-9));
    }

    SECTION("requested photon number carries into the state") {
        MultiMeasurementPlan plan =
            multi_measurement_plan(beam, {lr}, 1.0, pool, 2.5e4);
        CHECK(plan.state.mean_photons() == Approx(2.5e4).epsilon(1e-12));
        CHECK(plan.reports[0].shot_noise == Approx(2.5e4).epsilon(1e-9));
    }

    SECTION("rejections") {
        CHECK_THROWS_AS(multi_measurement_plan(beam, {}, 1.0, pool), shape_error);
        PixelLayout uniform = half_x(g, {1.0, 1.0});
        CHECK_THROWS_AS(multi_measurement_plan(beam, {lr, uniform}, 1.0, pool),
                        degenerate_error);
        CHECK_THROWS_AS(multi_measurement_plan(beam, {lr}, 1.0, pool, 0.0),
                        degenerate_error);
    }
}
