#include "recdep/property_suite.hpp"

#include "recdep/numeric_solver.hpp"
#include "recdep/uniform_closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace recdep {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kThresholdTol = 1e-6;
constexpr double kLossTol = 1e-8;

double ratio(double violation, double tolerance) {
    if (violation <= tolerance) return tolerance > 0.0 ? violation / tolerance : 0.0;
    return tolerance > 0.0 ? violation / tolerance : kInf;
}

class ReportBuilder {
public:
    ReportBuilder(std::string id, std::string title) {
        report_.id = std::move(id);
        report_.title = std::move(title);
        report_.witness = json::object();
        report_.grid = json::object();
    }

    void check(std::string name, double violation, double tolerance) {
        if (std::isnan(violation)) violation = kInf;
        report_.checks.push_back({std::move(name), violation, tolerance, violation <= tolerance});
    }

    json& witness() { return report_.witness; }
    json& grid() { return report_.grid; }

    PropertyReport finish() {
        double worst = -1.0;
        for (const auto& c : report_.checks) {
            const double r = ratio(c.violation, c.tolerance);
            if (r > worst) {
                worst = r;
                report_.worst_violation = c.violation;
                report_.tolerance = c.tolerance;
            }
            report_.pass = report_.pass && c.pass;
        }
        return std::move(report_);
    }

private:
    PropertyReport report_;
};

// Largest step against the required direction (0 if none).
double nondecreasing_violation(const std::vector<double>& v) {
    double worst = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) worst = std::max(worst, v[k - 1] - v[k]);
    return worst;
}

double nonincreasing_violation(const std::vector<double>& v) {
    double worst = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) worst = std::max(worst, v[k] - v[k - 1]);
    return worst;
}

// Shortfall of the smallest step below `margin`; 0 when every step increases by at least margin.
double strict_increase_violation(const std::vector<double>& v, double margin) {
    double m = kInf;
    for (std::size_t k = 1; k < v.size(); ++k) m = std::min(m, v[k] - v[k - 1]);
    return std::max(0.0, margin - m);
}

std::vector<std::unique_ptr<SignalModel>> builtin_models(const PropertyGrids& grids) {
    std::vector<std::unique_ptr<SignalModel>> models;
    models.push_back(std::make_unique<UniformModel>());
    models.push_back(std::make_unique<BetaFamilyModel>(grids.beta));
    return models;
}

double q_opt(const SignalModel& model, const CostStructure& costs, const ReferenceDependence& rd) {
    return std::get<TwoLevelPolicy>(optimize_two_level(model, costs, rd).argmin).q_bar;
}

json costs_json(const CostStructure& c) { return json::array({c.c_I, c.c_II}); }

json costs_grid_json(const std::vector<CostStructure>& costs) {
    json out = json::array();
    for (const auto& c : costs) out.push_back(costs_json(c));
    return out;
}

}  // namespace

json to_json(const PropertyReport& report) {
    json checks = json::array();
    for (const auto& c : report.checks)
        checks.push_back({{"name", c.name}, {"violation", c.violation}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    return {{"id", report.id},
            {"title", report.title},
            {"pass", report.pass},
            {"worst_violation", report.worst_violation},
            {"tolerance", report.tolerance},
            {"grid", report.grid},
            {"checks", checks},
            {"witness", report.witness}};
}

PropertyReport check_remark1(const PropertyGrids& grids) {
    ReportBuilder b("remark1", "optimal machine threshold differs from the decision cutoff p*");
    std::vector<CostStructure> costs = grids.costs;
    if (std::none_of(costs.begin(), costs.end(), [](const auto& c) { return c.c_I > c.c_II; }))
        costs.emplace_back(3.0, 1.0);
    b.grid()["costs"] = costs_grid_json(costs);
    const UniformModel model;
    double worst_q = 0.0;
    double worst_equal = 0.0;
    double not_distinct = 0.0;
    json rows = json::array();
    for (const auto& c : costs) {
        const double q = q_opt(model, c, {});
        const double p_star = c.p_bar_star();
        worst_q = std::max(worst_q, std::abs(q - 0.5));
        if (c.c_I == c.c_II)
            worst_equal = std::max(worst_equal, std::abs(q - p_star));
        else if (std::abs(q - p_star) <= 1e-3)
            not_distinct += 1.0;
        rows.push_back({{"costs", costs_json(c)}, {"q_opt", q}, {"p_bar_star", p_star}});
    }
    b.check("uniform: |q_opt - 1/2|", worst_q, 1e-4);
    b.check("uniform, c_I = c_II: |q_opt - p*|", worst_equal, 1e-4);
    b.check("uniform, c_I != c_II: cost pairs with q_opt within 1e-3 of p*", not_distinct, 0.0);
    b.witness()["rows"] = rows;
    return b.finish();
}

PropertyReport check_remark2(const PropertyGrids& grids) {
    ReportBuilder b("remark2", "recommendations can hurt, but optimized ones never do when delta_I = 0");

    // (a) A fixed threshold under strong reference dependence.
    const BetaFamilyModel weak(grids.weak_machine);
    const CostStructure c = grids.reference_costs;
    const ReferenceDependence strong(0.0, grids.remark2_delta_II);
    const double fixed_loss = expected_loss(weak, TwoLevelPolicy{c.p_bar_star()}, c, strong);
    const double none_loss = benchmarks(weak, c).no_recommendation_loss;
    b.check("(a) fixed recommendation loss - no recommendation loss > 1e-3",
            std::max(0.0, 1e-3 - (fixed_loss - none_loss)), 0.0);
    b.witness()["a"] = {{"model", weak.describe()},
                        {"costs", costs_json(c)},
                        {"delta", json::array({0.0, grids.remark2_delta_II})},
                        {"q_bar", c.p_bar_star()},
                        {"fixed_loss", fixed_loss},
                        {"no_recommendation_loss", none_loss},
                        {"margin", fixed_loss - none_loss}};

    // (b) Optimized two-level loss against no recommendation.
    b.grid()["costs"] = costs_grid_json(grids.costs);
    b.grid()["delta_II"] = grids.deltas;
    json rows = json::array();
    for (const auto& model : builtin_models(grids)) {
        double closest = -kInf;
        json witness_row;
        for (const auto& cc : grids.costs) {
            const double none = benchmarks(*model, cc).no_recommendation_loss;
            for (double d : grids.deltas) {
                const double opt = optimize_two_level(*model, cc, ReferenceDependence(0.0, d)).value;
                if (opt - none > closest) {
                    closest = opt - none;
                    witness_row = {{"costs", costs_json(cc)}, {"delta_II", d}, {"optimized_loss", opt},
                                   {"no_recommendation_loss", none}};
                }
            }
        }
        b.check("(b) " + model->name() + ": optimized loss - no recommendation loss", std::max(0.0, closest),
                kLossTol);
        witness_row["model"] = model->name();
        rows.push_back(witness_row);
    }
    b.witness()["b"] = rows;

    const UniformModel uniform;
    const CostStructure even(1.0, 1.0);
    const double gain = benchmarks(uniform, even).no_recommendation_loss -
                        optimize_two_level(uniform, even, ReferenceDependence{}).value;
    b.check("(b) uniform, c=(1,1), delta=0: recommendation strictly improves", gain > kLossTol ? 0.0 : kLossTol - gain,
            0.0);
    b.witness()["b_information_gain"] = gain;
    return b.finish();
}

PropertyReport check_prop1(const PropertyGrids& grids) {
    ReportBuilder b("prop1", "reference dependence increases adherence");
    const CostStructure c = grids.reference_costs;
    const TwoLevelPolicy policy{grids.fixed_q_bar};
    b.grid() = {{"costs", costs_json(c)}, {"q_bar", policy.q_bar}, {"deltas", grids.deltas}};
    for (const auto& model : builtin_models(grids)) {
        std::vector<double> safe, risky;
        for (double d : grids.deltas) {
            safe.push_back(adherence(*model, policy, c, ReferenceDependence(0.0, d)).prob_safe);
            risky.push_back(adherence(*model, policy, c, ReferenceDependence(d, 0.0)).prob_risky);
        }
        b.check(model->name() + ": adherence_safe nondecreasing in delta_II", nondecreasing_violation(safe),
                kThresholdTol);
        b.check(model->name() + ": adherence_risky nondecreasing in delta_I", nondecreasing_violation(risky),
                kThresholdTol);
        b.witness()[model->name()] = {{"adherence_safe", safe}, {"adherence_risky", risky}};
    }
    return b.finish();
}

PropertyReport check_prop2(const PropertyGrids& grids) {
    ReportBuilder b("prop2", "strong symmetric reference dependence reverts the threshold to p*");
    const CostStructure c = grids.reference_costs;
    b.grid() = {{"costs", costs_json(c)}, {"deltas", grids.large_deltas}};
    for (const auto& model : builtin_models(grids)) {
        std::vector<double> gaps;
        for (double d : grids.large_deltas) gaps.push_back(std::abs(q_opt(*model, c, ReferenceDependence(d, d)) - c.p_bar_star()));
        b.check(model->name() + ": |q_opt - p*| nonincreasing", nonincreasing_violation(gaps), kThresholdTol);
        b.check(model->name() + ": |q_opt - p*| < 1e-2 at the largest delta",
                gaps.empty() ? kInf : std::max(0.0, gaps.back() - 1e-2), 0.0);
        if (model->name() == "uniform") {
            std::vector<double> negated(gaps.size());
            std::transform(gaps.begin(), gaps.end(), negated.begin(), [](double g) { return -g; });
            b.check("uniform: |q_opt - p*| strictly decreasing", strict_increase_violation(negated, 1e-9), 0.0);
        }
        b.witness()[model->name()] = {{"gap", gaps}, {"p_bar_star", c.p_bar_star()}};
    }
    return b.finish();
}

PropertyReport check_prop3(const PropertyGrids& grids) {
    ReportBuilder b("prop3", "q_opt decreases in delta_I and increases in delta_II");
    const CostStructure c = grids.reference_costs;
    b.grid() = {{"costs", costs_json(c)}, {"deltas", grids.deltas}};
    for (const auto& model : builtin_models(grids)) {
        std::vector<double> along_I, along_II;
        for (double d : grids.deltas) {
            along_I.push_back(q_opt(*model, c, ReferenceDependence(d, 0.0)));
            along_II.push_back(q_opt(*model, c, ReferenceDependence(0.0, d)));
        }
        b.check(model->name() + ": q_opt nonincreasing in delta_I", nonincreasing_violation(along_I), kThresholdTol);
        b.check(model->name() + ": q_opt nondecreasing in delta_II", nondecreasing_violation(along_II), kThresholdTol);
        json w = {{"q_opt_along_delta_I", along_I}, {"q_opt_along_delta_II", along_II}};
        if (model->name() == "uniform") {
            b.check("uniform: q_opt strictly increasing in delta_II", strict_increase_violation(along_II, 1e-9), 0.0);
            std::vector<double> closed;
            double worst = 0.0;
            for (std::size_t k = 0; k < grids.deltas.size(); ++k) {
                closed.push_back(uniform::optimal_threshold_two_level({c, grids.deltas[k]}).q_opt);
                worst = std::max(worst, std::abs(closed.back() - along_II[k]));
            }
            b.check("uniform: numeric q_opt matches the closed form", worst, kThresholdTol);
            w["closed_form_along_delta_II"] = closed;
        }
        b.witness()[model->name()] = w;
    }
    return b.finish();
}

PropertyReport check_prop4(const PropertyGrids& grids) {
    ReportBuilder b("prop4", "gain from a third recommendation level grows with delta_II");
    const CostStructure c = grids.reference_costs;
    b.grid() = {{"costs", costs_json(c)}, {"delta_II", grids.deltas}};
    const UniformModel model;
    std::vector<double> gains;
    std::vector<double> q_low, q_high;
    for (double d : grids.deltas) {
        const ReferenceDependence rd(0.0, d);
        const auto two = optimize_two_level(model, c, rd);
        const auto three = optimize_three_level(model, c, rd);
        gains.push_back(two.value - three.value);
        const auto& p = std::get<ThreeLevelPolicy>(three.argmin);
        q_low.push_back(p.q_low);
        q_high.push_back(p.q_high);
    }
    double worst = 0.0;
    double best_gain_increase = -kInf;
    for (double g : gains) {
        worst = std::max(worst, gains.front() - g);
        best_gain_increase = std::max(best_gain_increase, g - gains.front());
    }
    b.check("uniform: gain(delta_II) >= gain(0)", worst, kLossTol);
    b.check("uniform: some gain(delta_II) - gain(0) > 1e-4", std::max(0.0, 1e-4 - best_gain_increase), 0.0);
    double ratio_gap = 0.0;
    for (std::size_t k = 0; k < q_low.size(); ++k) ratio_gap = std::max(ratio_gap, std::abs(q_high[k] - 2.0 * q_low[k]));
    b.check("uniform: q_high = 2 q_low at the optimum", ratio_gap, kThresholdTol);
    b.witness() = {{"gain", gains}, {"q_low", q_low}, {"q_high", q_high}, {"max_gain_increase", best_gain_increase}};
    return b.finish();
}

PropertyReport check_prop5(const PropertyGrids& grids) {
    ReportBuilder b("prop5", "prospect-theory choices equal reference-dependent choices with delta = (lambda-1) c");
    b.grid() = {{"posterior_points", grids.posterior_points},
                {"lambda", grids.lambdas},
                {"costs", costs_grid_json(grids.costs)},
                {"references", json::array({"risky", "safe"})}};
    std::uint64_t cells = 0, mismatches = 0;
    json first_mismatch = nullptr;
    for (const auto& c : grids.costs) {
        for (double lambda : grids.lambdas) {
            const LossAversion la(lambda);
            const ReferenceDependence rd = pt_to_refdep(la, c);
            for (auto r : {Recommendation::risky, Recommendation::safe}) {
                for (int i = 0; i < grids.posterior_points; ++i) {
                    const double p = (i + 0.5) / grids.posterior_points;
                    const Action pt = minimizing_action(expected_pt_loss(p, r, c, la));
                    const Action dl = minimizing_action(expected_decision_loss(p, r, c, rd));
                    ++cells;
                    if (pt != dl) {
                        ++mismatches;
                        if (first_mismatch.is_null())
                            first_mismatch = {{"costs", costs_json(c)}, {"lambda", lambda},
                                              {"reference", to_string(r)}, {"posterior", p}};
                    }
                }
            }
        }
    }
    b.check("cells where the two actions differ", static_cast<double>(mismatches), 0.0);
    b.witness() = {{"cells", cells}, {"mismatches", mismatches}, {"first_mismatch", first_mismatch}};
    return b.finish();
}

const std::vector<std::string>& property_ids() {
    static const std::vector<std::string> ids{"remark1", "remark2", "prop1", "prop2", "prop3", "prop4", "prop5"};
    return ids;
}

PropertyReport run_property(std::string_view id, const PropertyGrids& grids) {
    if (id == "remark1") return check_remark1(grids);
    if (id == "remark2") return check_remark2(grids);
    if (id == "prop1") return check_prop1(grids);
    if (id == "prop2") return check_prop2(grids);
    if (id == "prop3") return check_prop3(grids);
    if (id == "prop4") return check_prop4(grids);
    if (id == "prop5") return check_prop5(grids);
    throw std::invalid_argument("unknown property id: " + std::string(id));
}

}  // namespace recdep
