#include "recdep/numeric_solver.hpp"

#include "recdep/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace recdep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

void validate_pair(double lo, double hi, const char* what) {
    if (!in_unit(lo) || !in_unit(hi) || lo > hi)
        throw std::invalid_argument(std::string(what) + ": thresholds must satisfy 0 <= q_low <= q_high <= 1");
}

double grid_point(int i, int n) { return n == 1 ? 0.0 : static_cast<double>(i) / (n - 1); }

// Loss of a region whose action is fixed by the machine.
double machine_region_loss(const SignalModel& model, QInterval interval, Action a, const CostStructure& c) {
    const SignalMass t = model.region(interval)->total();
    if (t.joint < kDegenerateMass) return 0.0;
    return a == Action::risky ? c.c_II * t.bad : c.c_I * (t.joint - t.bad);
}

double human_region_loss(const SignalModel& model, QInterval interval, double cutoff, const CostStructure& c) {
    return evaluate_region(*model.region(interval), cutoff, c).loss;
}

// Loss of a policy with thresholds a <= b, split into its three regions.
struct TwoThresholdObjective {
    std::function<double(double)> lower;           // region Q <= a
    std::function<double(double, double)> middle;  // region a < Q <= b
    std::function<double(double)> upper;           // region Q > b

    double operator()(double a, double b) const { return lower(a) + middle(a, b) + upper(b); }
};

struct TwoThresholdOptimum {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    bool multimodal = false;
};

TwoThresholdOptimum minimize_two_thresholds(const TwoThresholdObjective& obj, const GridSpec& grid) {
    const int n = grid.points_2d;
    if (n < 2) throw std::invalid_argument("grid.points_2d must be >= 2");
    const double res = 1.0 / (n - 1);

    std::vector<double> lower(n), upper(n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        lower[i] = obj.lower(grid_point(static_cast<int>(i), n));
        upper[i] = obj.upper(grid_point(static_cast<int>(i), n));
    });
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    std::vector<double> middle_vals(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t k) {
        middle_vals[k] = obj.middle(grid_point(pairs[k].first, n), grid_point(pairs[k].second, n));
    });

    // value(i, j) for i <= j, stored densely; infeasible cells are +inf.
    std::vector<double> value(static_cast<std::size_t>(n) * n, kInf);
    auto at = [&](int i, int j) -> double& { return value[static_cast<std::size_t>(i) * n + j]; };
    for (int i = 0; i < n; ++i) at(i, i) = lower[i] + upper[i];
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        at(i, j) = lower[i] + middle_vals[k] + upper[j];
    }

    int bi = 0, bj = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            if (at(i, j) < at(bi, bj)) bi = i, bj = j;
    const double grid_best = at(bi, bj);

    TwoThresholdOptimum out;
    for (int i = 0; i < n && !out.multimodal; ++i) {
        for (int j = i; j < n; ++j) {
            if (std::max(std::abs(i - bi), std::abs(j - bj)) <= 2) continue;
            const double v = at(i, j);
            if (v > grid_best + grid.multimodal_tol) continue;
            bool local_min = true;
            const int di[] = {-1, 1, 0, 0};
            const int dj[] = {0, 0, -1, 1};
            for (int d = 0; d < 4; ++d) {
                const int ii = i + di[d], jj = j + dj[d];
                if (ii < 0 || jj < 0 || ii >= n || jj >= n || ii > jj) continue;
                if (at(ii, jj) < v) local_min = false;
            }
            if (local_min) {
                out.multimodal = true;
                break;
            }
        }
    }

    // Cyclic coordinate refinement around the best cell.
    double a = grid_point(bi, n);
    double b = grid_point(bj, n);
    double current = grid_best;
    double width = 2.0 * res;
    for (int cycle = 0; cycle < 300; ++cycle) {
        const double a_old = a, b_old = b;
        const auto ra = golden_section([&](double x) { return obj(x, b); }, std::max(0.0, a - width),
                                       std::min(b, a + width), grid.refine_tol);
        if (ra.value < current) a = ra.x, current = ra.value;
        const auto rb = golden_section([&](double x) { return obj(a, x); }, std::max(a, b - width),
                                       std::min(1.0, b + width), grid.refine_tol);
        if (rb.value < current) b = rb.x, current = rb.value;
        const double move = std::max(std::abs(a - a_old), std::abs(b - b_old));
        if (move < 10.0 * grid.refine_tol) break;
        width = std::max(4.0 * move, 1e-7);
    }
    out.a = a;
    out.b = b;
    out.value = current;
    return out;
}

}  // namespace

void validate(const Policy& policy) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, TwoLevelPolicy>) {
                if (!in_unit(p.q_bar)) throw std::invalid_argument("two-level policy: q_bar must lie in [0,1]");
            } else if constexpr (std::is_same_v<T, ThreeLevelPolicy>) {
                validate_pair(p.q_low, p.q_high, "three-level policy");
            } else {
                validate_pair(p.q_low, p.q_high, "delegation policy");
            }
        },
        policy);
}

Recommendation recommend(const Policy& policy, double q) {
    return std::visit(
        [q](const auto& p) -> Recommendation {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, TwoLevelPolicy>) {
                return q <= p.q_bar ? Recommendation::risky : Recommendation::safe;
            } else {
                const Recommendation middle =
                    std::is_same_v<T, ThreeLevelPolicy> ? Recommendation::dont_know : Recommendation::delegate;
                if (q <= p.q_low) return Recommendation::risky;
                if (q <= p.q_high) return middle;
                return Recommendation::safe;
            }
        },
        policy);
}

std::vector<RecommendationRegion> regions_of(const Policy& policy) {
    return std::visit(
        [](const auto& p) -> std::vector<RecommendationRegion> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, TwoLevelPolicy>) {
                return {{Recommendation::risky, {0.0, p.q_bar}}, {Recommendation::safe, {p.q_bar, 1.0}}};
            } else {
                const Recommendation middle =
                    std::is_same_v<T, ThreeLevelPolicy> ? Recommendation::dont_know : Recommendation::delegate;
                return {{Recommendation::risky, {0.0, p.q_low}},
                        {middle, {p.q_low, p.q_high}},
                        {Recommendation::safe, {p.q_high, 1.0}}};
            }
        },
        policy);
}

double cutoff_for(Recommendation r, const CostStructure& costs, const ResponseCutoffs& cutoffs) {
    switch (r) {
        case Recommendation::risky: return cutoffs.p_bar_risky;
        case Recommendation::safe: return cutoffs.p_bar_safe;
        default: return costs.p_bar_star();
    }
}

Action best_response(const SignalModel& model, double h, Recommendation r, const Policy& policy,
                     const CostStructure& costs, const ResponseCutoffs& cutoffs) {
    const bool delegation = std::holds_alternative<DelegationPolicy>(policy);
    if (delegation && r != Recommendation::delegate)
        return r == Recommendation::risky ? Action::risky : Action::safe;
    for (const auto& region : regions_of(policy)) {
        if (region.rec != r) continue;
        const double p = model.region(region.interval)->posterior(h);
        return act_on_posterior(p, cutoff_for(r, costs, cutoffs));
    }
    throw std::invalid_argument("best_response: recommendation is not emitted by this policy");
}

RegionEvaluation evaluate_region(const Region& region, double cutoff, const CostStructure& costs,
                                 const ScanOptions& scan) {
    RegionEvaluation ev;
    const SignalMass total = region.total();
    if (total.joint < kDegenerateMass) {
        ev.degenerate = true;
        return ev;
    }
    ev.mass = total.joint;
    ev.bad_mass = total.bad;

    const auto [s0, s1] = region.scan_range();
    const int n = std::max(2, scan.scan_points);
    auto risky_at = [&](double h) { return region.posterior(h) <= cutoff; };
    auto add_piece = [&](double a, double b, bool risky) {
        if (!risky) return;
        const SignalMass m = region.masses(a, b);
        ev.risky_mass += m.joint;
        ev.risky_bad_mass += m.bad;
    };

    double start = -kInf;
    double prev_x = s0;
    bool prev = risky_at(s0);
    for (int i = 1; i < n; ++i) {
        const double x = s0 + (s1 - s0) * i / (n - 1);
        const bool cur = risky_at(x);
        if (cur != prev) {
            double lo = prev_x, hi = x;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                if (risky_at(mid) == prev)
                    lo = mid;
                else
                    hi = mid;
            }
            add_piece(start, hi, prev);
            start = hi;
            prev = cur;
        }
        prev_x = x;
    }
    add_piece(start, kInf, prev);

    const double safe_mass = ev.mass - ev.risky_mass;
    const double safe_bad = ev.bad_mass - ev.risky_bad_mass;
    ev.loss = costs.c_II * ev.risky_bad_mass + costs.c_I * (safe_mass - safe_bad);
    return ev;
}

double expected_loss(const SignalModel& model, const Policy& policy, const CostStructure& costs,
                     const ResponseCutoffs& cutoffs) {
    validate(policy);
    if (const auto* d = std::get_if<DelegationPolicy>(&policy))
        return delegate_pipeline(model, ThreeLevelPolicy{d->q_low, d->q_high}, costs);
    double loss = 0.0;
    for (const auto& region : regions_of(policy))
        loss += human_region_loss(model, region.interval, cutoff_for(region.rec, costs, cutoffs), costs);
    return loss;
}

double expected_loss(const SignalModel& model, const Policy& policy, const CostStructure& costs,
                     const ReferenceDependence& rd) {
    return expected_loss(model, policy, costs, response_cutoffs(costs, rd));
}

double delegate_pipeline(const SignalModel& model, const ThreeLevelPolicy& policy, const CostStructure& costs) {
    validate(Policy{policy});
    return machine_region_loss(model, {0.0, policy.q_low}, Action::risky, costs) +
           human_region_loss(model, {policy.q_low, policy.q_high}, costs.p_bar_star(), costs) +
           machine_region_loss(model, {policy.q_high, 1.0}, Action::safe, costs);
}

OptimizationResult optimize_two_level(const SignalModel& model, const CostStructure& costs,
                                      const ResponseCutoffs& cutoffs, const GridSpec& grid) {
    const int n = grid.points;
    if (n < 3) throw std::invalid_argument("grid.points must be >= 3");
    auto loss_at = [&](double q) { return expected_loss(model, TwoLevelPolicy{q}, costs, cutoffs); };

    std::vector<double> vals(static_cast<std::size_t>(n));
    parallel_for(vals.size(), [&](std::size_t i) { vals[i] = loss_at(grid_point(static_cast<int>(i), n)); });
    const int best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());

    OptimizationResult out;
    out.grid_resolution = 1.0 / (n - 1);
    for (int i = 0; i < n; ++i) {
        if (std::abs(i - best) <= 2 || vals[i] > vals[best] + grid.multimodal_tol) continue;
        const bool left_ok = i == 0 || vals[i] <= vals[i - 1];
        const bool right_ok = i == n - 1 || vals[i] <= vals[i + 1];
        if (left_ok && right_ok) out.multimodal_flag = true;
    }

    const double lo = grid_point(std::max(best - 1, 0), n);
    const double hi = grid_point(std::min(best + 1, n - 1), n);
    const ScalarMinimum refined = golden_section(loss_at, lo, hi, grid.refine_tol);
    if (refined.value < vals[best]) {
        out.argmin = TwoLevelPolicy{refined.x};
        out.value = refined.value;
    } else {
        out.argmin = TwoLevelPolicy{grid_point(best, n)};
        out.value = vals[best];
    }
    return out;
}

OptimizationResult optimize_two_level(const SignalModel& model, const CostStructure& costs,
                                      const ReferenceDependence& rd, const GridSpec& grid) {
    return optimize_two_level(model, costs, response_cutoffs(costs, rd), grid);
}

OptimizationResult optimize_three_level(const SignalModel& model, const CostStructure& costs,
                                        const ResponseCutoffs& cutoffs, const GridSpec& grid) {
    const double p_star = costs.p_bar_star();
    TwoThresholdObjective obj{
        [&](double a) { return human_region_loss(model, {0.0, a}, cutoffs.p_bar_risky, costs); },
        [&](double a, double b) { return human_region_loss(model, {a, b}, p_star, costs); },
        [&](double b) { return human_region_loss(model, {b, 1.0}, cutoffs.p_bar_safe, costs); }};
    const TwoThresholdOptimum opt = minimize_two_thresholds(obj, grid);
    OptimizationResult out;
    out.argmin = ThreeLevelPolicy{opt.a, opt.b};
    out.value = opt.value;
    out.multimodal_flag = opt.multimodal;
    out.grid_resolution = 1.0 / (grid.points_2d - 1);
    return out;
}

OptimizationResult optimize_three_level(const SignalModel& model, const CostStructure& costs,
                                        const ReferenceDependence& rd, const GridSpec& grid) {
    return optimize_three_level(model, costs, response_cutoffs(costs, rd), grid);
}

OptimizationResult optimize_delegation(const SignalModel& model, const CostStructure& costs, const GridSpec& grid) {
    TwoThresholdObjective obj{
        [&](double a) { return machine_region_loss(model, {0.0, a}, Action::risky, costs); },
        [&](double a, double b) { return human_region_loss(model, {a, b}, costs.p_bar_star(), costs); },
        [&](double b) { return machine_region_loss(model, {b, 1.0}, Action::safe, costs); }};
    const TwoThresholdOptimum opt = minimize_two_thresholds(obj, grid);
    OptimizationResult out;
    out.argmin = DelegationPolicy{opt.a, opt.b};
    out.value = opt.value;
    out.multimodal_flag = opt.multimodal;
    out.grid_resolution = 1.0 / (grid.points_2d - 1);
    return out;
}

Adherence adherence(const SignalModel& model, const TwoLevelPolicy& policy, const CostStructure& costs,
                    const ResponseCutoffs& cutoffs) {
    validate(Policy{policy});
    const RegionEvaluation risky = evaluate_region(*model.region({0.0, policy.q_bar}), cutoffs.p_bar_risky, costs);
    const RegionEvaluation safe = evaluate_region(*model.region({policy.q_bar, 1.0}), cutoffs.p_bar_safe, costs);
    if (risky.degenerate || safe.degenerate)
        throw std::invalid_argument("adherence: a recommendation region has zero probability");
    return Adherence{risky.risky_mass / risky.mass, (safe.mass - safe.risky_mass) / safe.mass};
}

Adherence adherence(const SignalModel& model, const TwoLevelPolicy& policy, const CostStructure& costs,
                    const ReferenceDependence& rd) {
    return adherence(model, policy, costs, response_cutoffs(costs, rd));
}

Benchmarks benchmarks(const SignalModel& model, const CostStructure& costs) {
    const double p_star = costs.p_bar_star();
    Benchmarks b;
    b.oracle_loss = model.oracle_loss(costs);
    b.human_alone_loss = human_region_loss(model, {0.0, 1.0}, p_star, costs);
    b.machine_alone_loss = machine_region_loss(model, {0.0, p_star}, Action::risky, costs) +
                           machine_region_loss(model, {p_star, 1.0}, Action::safe, costs);
    b.no_recommendation_loss = b.human_alone_loss;
    return b;
}

}  // namespace recdep
