#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "recdep/rng.hpp"
#include "recdep/signal_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace recdep;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BetaFamilyModel default_beta() { return BetaFamilyModel(BetaFamilyModel::Params{}); }

}  // namespace

TEST_CASE("uniform region totals") {
    const UniformModel u;
    const auto r = u.region({0.2, 0.7});
    CHECK(r->total().joint == doctest::Approx(0.5));
    CHECK(r->total().bad == doctest::Approx((0.49 - 0.04) / 2.0));
    CHECK(u.region_mass({0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(u.machine_posterior(0.3) == 0.3);
    CHECK(u.oracle_loss(CostStructure(1, 3)) == 0.0);
}

TEST_CASE("exact region masses agree with integrated densities") {
    const UniformModel u;
    const BetaFamilyModel b = default_beta();
    for (const SignalModel* model : {static_cast<const SignalModel*>(&u), static_cast<const SignalModel*>(&b)}) {
        for (QInterval iv : {QInterval{0.0, 0.3}, QInterval{0.3, 0.55}, QInterval{0.55, 1.0}}) {
            const auto r = model->region(iv);
            for (auto [lo, hi] : {std::pair{-kInf, 0.25}, std::pair{0.25, 0.6}, std::pair{0.6, kInf}}) {
                const SignalMass exact = r->masses(lo, hi);
                const SignalMass numeric = integrate_density(*r, lo, hi);
                CHECK(exact.joint == doctest::Approx(numeric.joint).epsilon(1e-6));
                CHECK(exact.bad == doctest::Approx(numeric.bad).epsilon(1e-6));
            }
            const SignalMass whole = r->masses(-kInf, kInf);
            CHECK(whole.joint == doctest::Approx(r->total().joint).epsilon(1e-10));
            CHECK(whole.bad == doctest::Approx(r->total().bad).epsilon(1e-10));
        }
    }
}

TEST_CASE("beta regions partition the prior") {
    const BetaFamilyModel b = default_beta();
    double joint = 0.0, bad = 0.0;
    for (QInterval iv : {QInterval{0.0, 0.2}, QInterval{0.2, 0.4}, QInterval{0.4, 1.0}}) {
        const auto t = b.region(iv)->total();
        joint += t.joint;
        bad += t.bad;
    }
    CHECK(joint == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bad == doctest::Approx(2.0 / 5.0).epsilon(1e-8));
}

TEST_CASE("beta posteriors") {
    const BetaFamilyModel b = default_beta();
    double prev = -1.0;
    for (int i = -20; i <= 40; ++i) {
        const double q = b.machine_posterior(i / 20.0);
        CHECK(q >= prev);
        CHECK(q >= 0.0);
        CHECK(q <= 1.0);
        prev = q;
    }
    const double m = b.machine_signal_for(0.45);
    CHECK(b.machine_posterior(m) == doctest::Approx(0.45).epsilon(1e-9));

    // A narrow region around M = m reproduces the pooled posterior.
    const double m0 = 0.5;
    const double q0 = b.machine_posterior(m0);
    const auto narrow = b.region({b.machine_posterior(m0 - 1e-4), b.machine_posterior(m0 + 1e-4)});
    for (double h : {0.1, 0.4, 0.8})
        CHECK(narrow->posterior(h) == doctest::Approx(b.joint_posterior(h, m0)).epsilon(1e-4));
    CHECK(q0 > 0.0);
}

TEST_CASE("beta sampling matches region masses") {
    const BetaFamilyModel b = default_beta();
    const QInterval iv{0.0, 0.4};
    const auto r = b.region(iv);
    const SignalMass expect = r->masses(-kInf, 0.3);
    Rng rng = stream_rng(11, 0);
    const int n = 200000;
    int hits = 0, bad_hits = 0;
    for (int i = 0; i < n; ++i) {
        const Draw d = b.sample(rng);
        if (d.h <= 0.3 && b.machine_posterior(d.m) <= iv.hi) {
            ++hits;
            if (d.y == Outcome::bad) ++bad_hits;
        }
    }
    const double p = static_cast<double>(hits) / n;
    const double pb = static_cast<double>(bad_hits) / n;
    CHECK(std::abs(p - expect.joint) <= 4.0 * std::sqrt(expect.joint * (1 - expect.joint) / n));
    CHECK(std::abs(pb - expect.bad) <= 4.0 * std::sqrt(expect.bad * (1 - expect.bad) / n));
}

TEST_CASE("beta oracle loss matches Monte Carlo") {
    const BetaFamilyModel b = default_beta();
    const CostStructure c(1, 2);
    const double analytic = b.oracle_loss(c);
    Rng rng = stream_rng(5, 0);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const Draw d = b.sample(rng);
        const Action a = act_on_posterior(b.joint_posterior(d.h, d.m), c.p_bar_star());
        const double l = base_loss(d.y, a, c);
        sum += l;
        sumsq += l * l;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - analytic) <= 4.0 * se);
}

TEST_CASE("beta model validation") {
    CHECK_THROWS_AS(BetaFamilyModel({0.5, 2.0, 0.1, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(BetaFamilyModel({2.0, 2.0, 0.0, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(BetaFamilyModel({2.0, 2.0, 0.1, -1.0}), std::invalid_argument);
    CHECK(default_beta().describe()["kind"] == "beta");
}
