#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "recdep/simulation.hpp"

#include <cmath>
#include <stdexcept>

using namespace recdep;

namespace {

SimConfig config(std::uint64_t n, std::uint64_t seed, Behavior b = {}) {
    SimConfig cfg;
    cfg.n_samples = n;
    cfg.seed = seed;
    cfg.behavior = b;
    return cfg;
}

bool same_report(const SimReport& a, const SimReport& b) {
    return a.counts.n == b.counts.n && a.mean_loss == b.mean_loss && a.stderr_loss == b.stderr_loss &&
           a.type_I_rate == b.type_I_rate && a.type_II_rate == b.type_II_rate &&
           (a.adherence_risky == b.adherence_risky || (std::isnan(a.adherence_risky) && std::isnan(b.adherence_risky)));
}

}  // namespace

TEST_CASE("uniform baseline loss") {
    const UniformModel u;
    const auto rep = simulate(u, TwoLevelPolicy{0.5}, CostStructure(1, 1), config(1'000'000, 42));
    CHECK(std::abs(rep.mean_loss - 0.125) <= 3.0 * rep.stderr_loss);
    CHECK(rep.counts.total() == 1'000'000);
    CHECK(rep.n_samples == 1'000'000);
    CHECK(rep.adherence_risky == doctest::Approx(0.75).epsilon(0.01));
}

TEST_CASE("oracle behavior is loss-free on the uniform model") {
    const UniformModel u;
    Behavior b;
    b.kind = BehaviorKind::oracle;
    const auto rep = simulate(u, TwoLevelPolicy{0.3}, CostStructure(2, 1), config(200'000, 1, b));
    CHECK(rep.mean_loss == 0.0);
    CHECK(rep.type_I_rate == 0.0);
    CHECK(rep.type_II_rate == 0.0);
}

TEST_CASE("reports do not depend on seed reuse or thread count") {
    const BetaFamilyModel beta(BetaFamilyModel::Params{});
    const CostStructure c(1, 2);
    Behavior b;
    b.rd = ReferenceDependence(0.0, 1.0);
    SimConfig serial = config(300'000, 9, b);
    serial.threads = 1;
    SimConfig parallel = serial;
    parallel.threads = 4;
    const auto r1 = simulate(beta, ThreeLevelPolicy{0.3, 0.5}, c, serial);
    const auto r2 = simulate(beta, ThreeLevelPolicy{0.3, 0.5}, c, parallel);
    const auto r3 = simulate(beta, ThreeLevelPolicy{0.3, 0.5}, c, serial);
    CHECK(same_report(r1, r2));
    CHECK(same_report(r1, r3));
    SimConfig other = serial;
    other.seed = 10;
    CHECK_FALSE(simulate(beta, ThreeLevelPolicy{0.3, 0.5}, c, other).counts.n == r1.counts.n);
}

TEST_CASE("loss decomposition holds on the counts") {
    const UniformModel u;
    const CostStructure c(1, 3);
    const auto rep = simulate(u, TwoLevelPolicy{0.4}, c, config(100'000, 3));
    CHECK(rep.mean_loss == doctest::Approx(c.c_I * rep.type_I_rate + c.c_II * rep.type_II_rate).epsilon(1e-15));
    std::uint64_t type_I = 0;
    for (auto r : {Recommendation::risky, Recommendation::safe}) type_I += rep.counts.at(Outcome::good, Action::safe, r);
    CHECK(rep.type_I_rate == static_cast<double>(type_I) / 100'000.0);
}

TEST_CASE("standard error scales as 1/sqrt(n)") {
    const UniformModel u;
    const CostStructure c(1, 1);
    const auto small = simulate(u, TwoLevelPolicy{0.5}, c, config(10'000, 4));
    const auto large = simulate(u, TwoLevelPolicy{0.5}, c, config(1'000'000, 4));
    const double ratio = small.stderr_loss / large.stderr_loss;
    CHECK(ratio > 5.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("prospect and reference-dependent behaviors take identical actions") {
    const BetaFamilyModel beta(BetaFamilyModel::Params{});
    const UniformModel u;
    const CostStructure c(1, 2);
    for (double lambda : {1.0, 1.5, 3.0}) {
        Behavior pt;
        pt.kind = BehaviorKind::prospect;
        pt.loss_aversion = LossAversion(lambda);
        Behavior rd;
        rd.rd = pt_to_refdep(pt.loss_aversion, c);
        for (const SignalModel* m : {static_cast<const SignalModel*>(&u), static_cast<const SignalModel*>(&beta)}) {
            SimConfig a = config(50'000, 21, pt);
            a.record_actions = true;
            SimConfig b = config(50'000, 21, rd);
            b.record_actions = true;
            const auto ra = simulate(*m, TwoLevelPolicy{0.4}, c, a);
            const auto rb = simulate(*m, TwoLevelPolicy{0.4}, c, b);
            CHECK(ra.actions.size() == 50'000);
            CHECK(ra.actions == rb.actions);
        }
    }
}

TEST_CASE("beta Monte Carlo agrees with the numeric solver") {
    const BetaFamilyModel beta(BetaFamilyModel::Params{});
    const CostStructure c(1, 2);
    Behavior b;
    b.rd = ReferenceDependence(0.5, 2.0);
    const auto cut = behavior_cutoffs(b, c);
    for (const Policy& p : {Policy{TwoLevelPolicy{0.35}}, Policy{ThreeLevelPolicy{0.25, 0.5}},
                            Policy{DelegationPolicy{0.25, 0.5}}}) {
        const auto rep = simulate(beta, p, c, config(400'000, 17, b));
        CHECK(std::abs(rep.mean_loss - expected_loss(beta, p, c, cut)) <= 4.0 * rep.stderr_loss);
    }
    const auto rep = simulate(beta, TwoLevelPolicy{0.35}, c, config(400'000, 17, b));
    const auto a = adherence(beta, TwoLevelPolicy{0.35}, c, cut);
    CHECK(rep.adherence_risky == doctest::Approx(a.prob_risky).epsilon(0.01));
    CHECK(rep.adherence_safe == doctest::Approx(a.prob_safe).epsilon(0.01));
}

TEST_CASE("deviation-cost behavior uses its cutoffs") {
    const UniformModel u;
    const CostStructure c(1, 1);
    Behavior b;
    b.kind = BehaviorKind::deviation_cost;
    b.deviation = DeviationCosts(0.2, 0.1);
    const auto rep = simulate(u, TwoLevelPolicy{0.5}, c, config(400'000, 8, b));
    const double analytic = expected_loss(u, TwoLevelPolicy{0.5}, c, behavior_cutoffs(b, c));
    CHECK(std::abs(rep.mean_loss - analytic) <= 4.0 * rep.stderr_loss);
}

TEST_CASE("sweeps") {
    const UniformModel u;
    const CostStructure c(1, 2);
    SweepRequest req;
    req.axis = SweepAxis::delta_II;
    req.values = {0.0, 0.5, 1.0, 2.0, 4.0};
    req.fixed_policy = TwoLevelPolicy{0.5};
    const auto rows = sweep(u, c, req, config(100'000, 5));
    REQUIRE(rows.size() == 5);
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].mc.adherence_safe >= rows[k - 1].mc.adherence_safe);

    SweepRequest opt;
    opt.axis = SweepAxis::delta_II;
    opt.values = {0.0, 1.0, 4.0};
    const auto orows = sweep(u, c, opt, config(10'000, 5));
    for (std::size_t k = 1; k < orows.size(); ++k)
        CHECK(std::get<TwoLevelPolicy>(orows[k].policy).q_bar >= std::get<TwoLevelPolicy>(orows[k - 1].policy).q_bar);

    SweepRequest lam;
    lam.axis = SweepAxis::lambda;
    lam.values = {1.0, 1.5, 2.0};
    const auto lrows = sweep(u, c, lam, config(10'000, 5));
    for (const auto& row : lrows) {
        const auto rd = pt_to_refdep(LossAversion(row.axis_value), c);
        CHECK(row.analytic_loss == doctest::Approx(optimize_two_level(u, c, rd).value));
        Behavior b;
        b.rd = rd;
        CHECK(simulate(u, row.policy, c, config(10'000, 5, b)).counts.n == row.mc.counts.n);
    }

    SweepRequest empty;
    CHECK_THROWS_AS(sweep(u, c, empty, config(10, 1)), std::invalid_argument);
    SweepRequest bad_q;
    bad_q.axis = SweepAxis::q_bar;
    bad_q.values = {0.5};
    bad_q.levels = Levels::three;
    CHECK_THROWS_AS(sweep(u, c, bad_q, config(10, 1)), std::invalid_argument);
    CHECK_THROWS_AS(simulate(u, TwoLevelPolicy{0.5}, c, config(0, 1)), std::invalid_argument);
}
