#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "grid_oracle.hpp"
#include "recdep/uniform_closed_form.hpp"

#include <stdexcept>

using namespace recdep;
using namespace recdep::uniform;

namespace {

double grid_two_level(double q, const UniformExample& ex) {
    const auto cut = response_cutoffs(ex.costs, ReferenceDependence(0.0, ex.delta_II));
    return oracle::uniform_grid_loss({{-1.0, q, cut.p_bar_risky}, {q, 1.0, cut.p_bar_safe}}, ex.costs);
}

}  // namespace

TEST_CASE("two-level loss agrees with brute-force integration") {
    for (const auto& c : {CostStructure(1, 1), CostStructure(1, 2), CostStructure(2, 1), CostStructure(1, 5)})
        for (double d : {0.0, 1.0, 4.0})
            for (double q : {0.2, 0.5, 0.7}) {
                const UniformExample ex(c, d);
                CHECK(expected_loss_two_level(q, ex) == doctest::Approx(grid_two_level(q, ex)).epsilon(2e-3));
            }
}

TEST_CASE("three-level loss agrees with brute-force integration") {
    const CostStructure c(1, 2);
    for (double d : {0.0, 2.0}) {
        const UniformExample ex(c, d);
        const auto cut = response_cutoffs(c, ReferenceDependence(0.0, d));
        const double lo = 0.3, hi = 0.65;
        const double grid = oracle::uniform_grid_loss(
            {{-1.0, lo, cut.p_bar_risky}, {lo, hi, c.p_bar_star()}, {hi, 1.0, cut.p_bar_safe}}, c);
        CHECK(expected_loss_three_level(lo, hi, ex) == doctest::Approx(grid).epsilon(2e-3));
    }
}

TEST_CASE("known values") {
    const UniformExample even(CostStructure(1, 1), 0.0);
    CHECK(expected_loss_two_level(0.5, even) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(solo_loss(CostStructure(1, 1)) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(optimal_threshold_two_level(even).q_opt == doctest::Approx(0.5));

    const UniformExample ex(CostStructure(1, 2), 1.0);
    CHECK(optimal_threshold_two_level(ex).q_opt == doctest::Approx(33.0 / 65.0).epsilon(1e-14));
    const auto three = optimal_thresholds_three_level(ex);
    CHECK(three.q_low == doctest::Approx(33.0 / 98.0).epsilon(1e-14));
    CHECK(three.q_high == doctest::Approx(33.0 / 49.0).epsilon(1e-14));

    const auto base = optimal_thresholds_three_level(UniformExample(CostStructure(1, 2), 0.0));
    CHECK(base.q_low == doctest::Approx(1.0 / 3.0));
    CHECK(base.q_high == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("closed-form optima are minima of the closed-form losses") {
    for (const auto& c : {CostStructure(1, 2), CostStructure(3, 1)})
        for (double d : {0.0, 0.5, 4.0, 50.0}) {
            const UniformExample ex(c, d);
            const auto two = optimal_threshold_two_level(ex);
            CHECK(two.expected_loss == doctest::Approx(expected_loss_two_level(two.q_opt, ex)));
            for (int i = 0; i <= 400; ++i) CHECK(two.expected_loss <= expected_loss_two_level(i / 400.0, ex) + 1e-15);

            const auto three = optimal_thresholds_three_level(ex);
            CHECK(three.expected_loss == doctest::Approx(expected_loss_three_level(three.q_low, three.q_high, ex)));
            for (int i = 0; i <= 60; ++i)
                for (int j = i; j <= 60; ++j)
                    CHECK(three.expected_loss <= expected_loss_three_level(i / 60.0, j / 60.0, ex) + 1e-15);
            CHECK(three.expected_loss <= two.expected_loss + 1e-15);
        }
}

TEST_CASE("q_opt increases with delta_II") {
    double prev = 0.0;
    for (double d : {0.0, 0.5, 1.0, 2.0, 4.0, 100.0}) {
        const double q = optimal_threshold_two_level(UniformExample(CostStructure(1, 2), d)).q_opt;
        CHECK(q > prev);
        prev = q;
    }
}

TEST_CASE("response thresholds and posteriors") {
    const UniformExample ex(CostStructure(1, 2), 1.0);
    const double q = 0.5;
    const auto h = response_thresholds(q, ex);
    // At the h cutoff the region posterior equals the decision cutoff.
    CHECK(posterior_given_region(h.risky, 0.0, q) == doctest::Approx(1.0 / 3.0));
    CHECK(posterior_given_region(h.safe, q, 1.0) == doctest::Approx(0.25));
    CHECK(posterior_given_region(0.95, 0.2, 0.4) == 1.0);
    CHECK(posterior_given_region(0.1, 0.2, 0.4) == 0.0);
    CHECK_THROWS_AS(posterior_given_region(0.5, 0.4, 0.4), std::invalid_argument);
    CHECK(oracle_action(0.6, 0.5) == Action::safe);
    CHECK(oracle_action(0.4, 0.5) == Action::risky);

    const auto eq = equilibrium_thresholds(ex);
    const double q_opt = optimal_threshold_two_level(ex).q_opt;
    CHECK(eq.safe == doctest::Approx((1.0 - q_opt) * 1.0 / 4.0));
    CHECK(eq.risky == doctest::Approx(response_thresholds(q_opt, ex).risky));
    CHECK_THROWS_AS(UniformExample(CostStructure(1, 1), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(expected_loss_three_level(0.6, 0.5, ex), std::invalid_argument);
}
