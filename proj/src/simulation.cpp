#include "recdep/simulation.hpp"

#include "recdep/parallel.hpp"
#include "recdep/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace recdep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Human-side posterior lookups for every region of the policy, built once.
class ResponseTable {
public:
    ResponseTable(const SignalModel& model, const Policy& policy) {
        for (const auto& r : regions_of(policy)) {
            recs_.push_back(r.rec);
            regions_.push_back(model.region(r.interval));
        }
    }

    double posterior(Recommendation rec, double h) const {
        for (std::size_t i = 0; i < recs_.size(); ++i)
            if (recs_[i] == rec) return regions_[i]->posterior(h);
        throw std::logic_error("recommendation outside the policy");
    }

private:
    std::vector<Recommendation> recs_;
    std::vector<std::unique_ptr<Region>> regions_;
};

bool is_reference(Recommendation r) { return r == Recommendation::risky || r == Recommendation::safe; }

}  // namespace

std::string_view to_string(BehaviorKind kind) {
    switch (kind) {
        case BehaviorKind::rational: return "rational";
        case BehaviorKind::ref_dependent: return "ref_dependent";
        case BehaviorKind::deviation_cost: return "deviation_cost";
        case BehaviorKind::delegate: return "delegate";
        case BehaviorKind::prospect: return "prospect";
        case BehaviorKind::oracle: return "oracle";
    }
    return "?";
}

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::delta_I: return "delta_I";
        case SweepAxis::delta_II: return "delta_II";
        case SweepAxis::lambda: return "lambda";
        case SweepAxis::q_bar: return "q_bar";
    }
    return "?";
}

ResponseCutoffs behavior_cutoffs(const Behavior& behavior, const CostStructure& costs) {
    switch (behavior.kind) {
        case BehaviorKind::ref_dependent: return response_cutoffs(costs, behavior.rd);
        case BehaviorKind::deviation_cost: return deviation_cost_cutoffs(costs, behavior.deviation);
        case BehaviorKind::prospect: return response_cutoffs(costs, pt_to_refdep(behavior.loss_aversion, costs));
        default: return ResponseCutoffs{costs.p_bar_star(), costs.p_bar_star()};
    }
}

std::uint64_t CellCounts::total() const {
    std::uint64_t t = 0;
    for (auto v : n) t += v;
    return t;
}

CellCounts& CellCounts::operator+=(const CellCounts& other) {
    for (std::size_t i = 0; i < n.size(); ++i) n[i] += other.n[i];
    return *this;
}

SimReport summarize(const CellCounts& counts, const CostStructure& costs) {
    SimReport rep;
    rep.counts = counts;
    const std::uint64_t n = counts.total();
    rep.n_samples = n;
    if (n == 0) return rep;

    std::uint64_t n_I = 0, n_II = 0;
    std::array<std::uint64_t, 4> by_rec{}, risky_by_rec{};
    for (int r = 0; r < 4; ++r) {
        const auto rec = static_cast<Recommendation>(r);
        n_I += counts.at(Outcome::good, Action::safe, rec);
        n_II += counts.at(Outcome::bad, Action::risky, rec);
        for (auto y : {Outcome::good, Outcome::bad}) {
            by_rec[r] += counts.at(y, Action::risky, rec) + counts.at(y, Action::safe, rec);
            risky_by_rec[r] += counts.at(y, Action::risky, rec);
        }
    }
    const double dn = static_cast<double>(n);
    rep.type_I_rate = static_cast<double>(n_I) / dn;
    rep.type_II_rate = static_cast<double>(n_II) / dn;
    rep.mean_loss = costs.c_I * rep.type_I_rate + costs.c_II * rep.type_II_rate;
    if (n > 1) {
        const double m = rep.mean_loss;
        const double n_zero = static_cast<double>(n - n_I - n_II);
        const double ss = static_cast<double>(n_I) * (costs.c_I - m) * (costs.c_I - m) +
                          static_cast<double>(n_II) * (costs.c_II - m) * (costs.c_II - m) + n_zero * m * m;
        rep.stderr_loss = std::sqrt(ss / (dn - 1.0) / dn);
    }
    const auto risky = static_cast<std::size_t>(Recommendation::risky);
    const auto safe = static_cast<std::size_t>(Recommendation::safe);
    rep.adherence_risky =
        by_rec[risky] ? static_cast<double>(risky_by_rec[risky]) / static_cast<double>(by_rec[risky]) : kNaN;
    rep.adherence_safe = by_rec[safe] ? static_cast<double>(by_rec[safe] - risky_by_rec[safe]) /
                                            static_cast<double>(by_rec[safe])
                                      : kNaN;
    return rep;
}

SimReport simulate(const SignalModel& model, const Policy& policy, const CostStructure& costs,
                   const SimConfig& cfg) {
    validate(policy);
    if (cfg.n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");

    const Behavior& behavior = cfg.behavior;
    const ResponseCutoffs cutoffs = behavior_cutoffs(behavior, costs);
    const double p_star = costs.p_bar_star();
    const bool machine_outer =
        std::holds_alternative<DelegationPolicy>(policy) || behavior.kind == BehaviorKind::delegate;
    const ResponseTable table(model, policy);

    auto respond = [&](const Draw& d, Recommendation r) -> Action {
        if (behavior.kind == BehaviorKind::oracle) return act_on_posterior(model.joint_posterior(d.h, d.m), p_star);
        if (machine_outer && is_reference(r)) return r == Recommendation::risky ? Action::risky : Action::safe;
        const double p = table.posterior(r, d.h);
        if (behavior.kind == BehaviorKind::prospect && is_reference(r))
            return minimizing_action(expected_pt_loss(p, r, costs, behavior.loss_aversion));
        return act_on_posterior(p, cutoff_for(r, costs, cutoffs));
    };

    const std::uint64_t blocks = (cfg.n_samples + kSimBlockSize - 1) / kSimBlockSize;
    std::vector<CellCounts> block_counts(blocks);
    std::vector<Action> actions(cfg.record_actions ? cfg.n_samples : 0);
    parallel_for(
        blocks,
        [&](std::size_t b) {
            Rng rng = stream_rng(cfg.seed, b);
            const std::uint64_t begin = b * kSimBlockSize;
            const std::uint64_t end = std::min(cfg.n_samples, begin + kSimBlockSize);
            CellCounts local;
            for (std::uint64_t i = begin; i < end; ++i) {
                const Draw d = model.sample(rng);
                const Recommendation r = recommend(policy, model.machine_posterior(d.m));
                const Action a = respond(d, r);
                ++local.at(d.y, a, r);
                if (cfg.record_actions) actions[i] = a;
            }
            block_counts[b] = local;
        },
        cfg.threads);

    CellCounts all;
    for (const auto& c : block_counts) all += c;
    SimReport rep = summarize(all, costs);
    rep.actions = std::move(actions);
    return rep;
}

PolicyEvaluation evaluate_policy(const SignalModel& model, const CostStructure& costs, const Behavior& behavior,
                                 Levels levels, const std::optional<Policy>& fixed, const GridSpec& grid) {
    PolicyEvaluation out;
    if (behavior.kind == BehaviorKind::oracle) {
        out.policy = fixed.value_or(Policy{TwoLevelPolicy{costs.p_bar_star()}});
        out.loss = model.oracle_loss(costs);
        return out;
    }
    const bool delegated = levels == Levels::delegate || behavior.kind == BehaviorKind::delegate;
    if (fixed) {
        validate(*fixed);
        out.policy = *fixed;
        if (delegated) {
            const auto [lo, hi] = std::visit(
                [](const auto& p) -> std::pair<double, double> {
                    if constexpr (requires { p.q_low; })
                        return {p.q_low, p.q_high};
                    else
                        return {p.q_bar, p.q_bar};
                },
                *fixed);
            out.policy = DelegationPolicy{lo, hi};
        }
        out.loss = expected_loss(model, out.policy, costs, behavior_cutoffs(behavior, costs));
        return out;
    }
    OptimizationResult res;
    if (delegated)
        res = optimize_delegation(model, costs, grid);
    else if (levels == Levels::three)
        res = optimize_three_level(model, costs, behavior_cutoffs(behavior, costs), grid);
    else
        res = optimize_two_level(model, costs, behavior_cutoffs(behavior, costs), grid);
    out.policy = res.argmin;
    out.loss = res.value;
    out.multimodal = res.multimodal_flag;
    return out;
}

std::vector<SweepRow> sweep(const SignalModel& model, const CostStructure& costs, const SweepRequest& request,
                            const SimConfig& cfg) {
    if (request.values.empty()) throw std::invalid_argument("sweep grid must not be empty");
    if (request.axis == SweepAxis::q_bar && request.levels != Levels::two)
        throw std::invalid_argument("a q_bar sweep needs a two-level policy");

    std::vector<SweepRow> rows;
    rows.reserve(request.values.size());
    for (double v : request.values) {
        SimConfig point = cfg;
        Behavior& b = point.behavior;
        std::optional<Policy> fixed = request.fixed_policy;
        switch (request.axis) {
            case SweepAxis::delta_I:
                b.kind = BehaviorKind::ref_dependent;
                b.rd = ReferenceDependence(v, b.rd.delta_II);
                break;
            case SweepAxis::delta_II:
                b.kind = BehaviorKind::ref_dependent;
                b.rd = ReferenceDependence(b.rd.delta_I, v);
                break;
            case SweepAxis::lambda:
                b.kind = BehaviorKind::prospect;
                b.loss_aversion = LossAversion(v);
                break;
            case SweepAxis::q_bar:
                fixed = TwoLevelPolicy{v};
                break;
        }
        const PolicyEvaluation ev = evaluate_policy(model, costs, b, request.levels, fixed, request.grid);
        SweepRow row;
        row.axis_value = v;
        row.policy = ev.policy;
        row.cutoffs = behavior_cutoffs(b, costs);
        row.analytic_loss = ev.loss;
        row.mc = simulate(model, ev.policy, costs, point);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace recdep
