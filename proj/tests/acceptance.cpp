// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "recdep/cli.hpp"
#include "recdep/numeric_solver.hpp"
#include "recdep/property_suite.hpp"
#include "recdep/simulation.hpp"
#include "recdep/uniform_closed_form.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <set>
#include <string>

using namespace recdep;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double two_level_q(const SignalModel& m, const CostStructure& c, const ReferenceDependence& rd) {
    return std::get<TwoLevelPolicy>(optimize_two_level(m, c, rd).argmin).q_bar;
}

Verdict from_report(const PropertyReport& r) {
    std::string detail = fmt("worst violation %.3g (tol %.3g)", r.worst_violation, r.tolerance);
    for (const auto& c : r.checks)
        if (!c.pass) detail += "; failed: " + c.name;
    return {r.pass, detail};
}

SimConfig sim(std::uint64_t n, std::uint64_t seed, const ReferenceDependence& rd = {}) {
    SimConfig cfg;
    cfg.n_samples = n;
    cfg.seed = seed;
    cfg.behavior.rd = rd;
    return cfg;
}

Verdict ac1() {
    const UniformModel u;
    double worst = 0.0;
    std::set<double> p_stars;
    for (const auto& c : {CostStructure(1, 1), CostStructure(1, 2), CostStructure(2, 1), CostStructure(1, 5)}) {
        worst = std::max(worst, std::abs(two_level_q(u, c, {}) - 0.5));
        p_stars.insert(c.p_bar_star());
    }
    return {worst <= 1e-4 && p_stars.size() == 4,
            fmt("max |q_opt - 0.5| = %.3g (tol 1e-4); %g distinct p* values", worst, static_cast<double>(p_stars.size()))};
}

Verdict ac2() {
    const UniformModel u;
    const CostStructure c(1, 2);
    const ReferenceDependence rd(0.0, 1.0);
    const double closed = uniform::optimal_threshold_two_level({c, 1.0}).q_opt;
    const double closed_err = std::abs(closed - 33.0 / 65.0);
    const double numeric_err = std::abs(two_level_q(u, c, rd) - closed);
    const auto best = simulate(u, TwoLevelPolicy{closed}, c, sim(1'000'000, 42, rd));
    double worst_excess = -1e300;
    for (double q : {0.45, 0.5, 0.55, 0.6}) {
        const auto other = simulate(u, TwoLevelPolicy{q}, c, sim(1'000'000, 42, rd));
        const double se = std::hypot(best.stderr_loss, other.stderr_loss);
        worst_excess = std::max(worst_excess, (best.mean_loss - other.mean_loss) / se);
    }
    return {closed_err <= 1e-12 && numeric_err <= 1e-4 && worst_excess <= 3.0,
            fmt("|closed - 33/65| = %.3g; |numeric - closed| = %.3g (tol 1e-4); max MC excess %.2f se (tol 3)",
                closed_err, numeric_err, worst_excess)};
}

Verdict ac3() {
    const UniformModel u;
    const CostStructure c(1, 2);
    auto three = [&](double d) { return std::get<ThreeLevelPolicy>(optimize_three_level(u, c, ReferenceDependence(0.0, d)).argmin); };
    const auto base = three(0.0);
    const double e0 = std::max(std::abs(base.q_low - 1.0 / 3.0), std::abs(base.q_high - 2.0 / 3.0));
    const auto one = three(1.0);
    const double e1 = std::max(std::abs(one.q_low - 33.0 / 98.0), std::abs(one.q_high - 33.0 / 49.0));
    double ratio = 0.0;
    for (double d : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        const auto p = three(d);
        ratio = std::max(ratio, std::abs(p.q_high - 2.0 * p.q_low));
    }
    return {e0 <= 1e-3 && e1 <= 1e-3 && ratio <= 1e-6,
            fmt("delta 0 error %.3g, delta 1 error %.3g (tol 1e-3); max |q_high - 2 q_low| = %.3g (tol 1e-6)", e0, e1,
                ratio)};
}

Verdict ac10() {
    const UniformModel u;
    const CostStructure c(1, 1);
    const bool exact_zero = u.oracle_loss(c) == 0.0;
    SimConfig oracle = sim(1'000'000, 42);
    oracle.behavior.kind = BehaviorKind::oracle;
    const bool mc_zero = simulate(u, TwoLevelPolicy{0.5}, c, oracle).mean_loss == 0.0;

    SimConfig serial = sim(1'000'000, 42);
    serial.threads = 1;
    SimConfig parallel = serial;
    parallel.threads = 4;
    const auto a = simulate(u, TwoLevelPolicy{0.5}, c, serial);
    const auto b = simulate(u, TwoLevelPolicy{0.5}, c, parallel);
    auto bytes = [](const SimReport& r) {
        nlohmann::json counts = nlohmann::json::array();
        for (auto n : r.counts.n) counts.push_back(n);
        return cli::dump_json({{"mean_loss", r.mean_loss},
                               {"stderr", r.stderr_loss},
                               {"type_I_rate", r.type_I_rate},
                               {"type_II_rate", r.type_II_rate},
                               {"adherence_risky", r.adherence_risky},
                               {"adherence_safe", r.adherence_safe},
                               {"counts", counts}});
    };
    const bool identical = bytes(a) == bytes(b);
    const double z = std::abs(a.mean_loss - 0.125) / a.stderr_loss;
    return {exact_zero && mc_zero && identical && z <= 3.0,
            std::string("oracle loss exactly 0: ") + (exact_zero && mc_zero ? "yes" : "no") +
                fmt("; MC |mean - 0.125| = %.2f se (tol 3)", z) +
                "; serial/parallel identical: " + (identical ? "yes" : "no")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "baseline threshold q = 1/2 while p* varies", ac1},
        {2, "recommendation-dependent threshold 33/65", ac2},
        {3, "three-level thresholds", ac3},
        {4, "adherence increases with reference dependence", [] { return from_report(check_prop1()); }},
        {5, "threshold reverts to p* under strong symmetric dependence", [] { return from_report(check_prop2()); }},
        {6, "threshold monotone in delta_I and delta_II", [] { return from_report(check_prop3()); }},
        {7, "third level gains more with delta_II", [] { return from_report(check_prop4()); }},
        {8, "prospect-theory choices equal reference-dependent choices", [] { return from_report(check_prop5()); }},
        {9, "recommendations can hurt; optimized ones do not", [] { return from_report(check_remark2()); }},
        {10, "oracle and Monte Carlo coherence", ac10},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failures;
        std::printf("[%s] AC%d %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
