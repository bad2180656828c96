#pragma once

#include <string_view>

// Loss primitives and the decision-maker's posterior cutoff logic.
//
// Conventions used throughout the library:
//   * posteriors are P(Y = bad | information);
//   * the risky action is taken iff posterior <= cutoff (ties go to risky).

namespace recdep {

enum class Outcome { good, bad };
enum class Action { safe, risky };
enum class Recommendation { risky, safe, dont_know, delegate };

std::string_view to_string(Outcome y);
std::string_view to_string(Action a);
std::string_view to_string(Recommendation r);

/// Costs of the two error types. Type-I: safe action when the outcome is good.
/// Type-II: risky action when the outcome is bad.
struct CostStructure {
    double c_I = 1.0;
    double c_II = 1.0;

    CostStructure() = default;
    CostStructure(double c_I_, double c_II_);

    /// Cutoff of a loss-minimizing decision without reference dependence.
    double p_bar_star() const { return c_I / (c_I + c_II); }
};

/// Extra perceived loss from an error made against the recommendation.
struct ReferenceDependence {
    double delta_I = 0.0;
    double delta_II = 0.0;

    ReferenceDependence() = default;
    ReferenceDependence(double delta_I_, double delta_II_);
};

/// Flat cost of overruling a recommendation, charged whatever the outcome.
struct DeviationCosts {
    double d_risky = 0.0;
    double d_safe = 0.0;

    DeviationCosts() = default;
    DeviationCosts(double d_risky_, double d_safe_);
};

struct LossAversion {
    double lambda = 1.0;

    LossAversion() = default;
    explicit LossAversion(double lambda_);
};

/// Posterior cutoffs the decision-maker applies after each recommendation.
struct ResponseCutoffs {
    double p_bar_risky = 0.5;
    double p_bar_safe = 0.5;
};

double base_loss(Outcome y, Action a, const CostStructure& costs);

/// Perceived loss of a reference-dependent decision-maker. Only defined for
/// risky/safe recommendations; other recommendations throw.
double decision_loss(Outcome y, Action a, Recommendation r, const CostStructure& costs,
                     const ReferenceDependence& rd);

/// Loss relative to the recommended action, with losses scaled by lambda.
/// Negative values are gains against the reference.
double pt_loss(Outcome y, Recommendation r, Action a, const CostStructure& costs,
               const LossAversion& la);

ReferenceDependence pt_to_refdep(const LossAversion& la, const CostStructure& costs);

ResponseCutoffs response_cutoffs(const CostStructure& costs, const ReferenceDependence& rd);
ResponseCutoffs deviation_cost_cutoffs(const CostStructure& costs, const DeviationCosts& d);

Action act_on_posterior(double p, double cutoff);

/// Expected loss of each action at posterior p, under decision_loss / pt_loss.
struct ActionValues {
    double risky = 0.0;
    double safe = 0.0;
};
ActionValues expected_decision_loss(double p, Recommendation r, const CostStructure& costs,
                                    const ReferenceDependence& rd);
ActionValues expected_pt_loss(double p, Recommendation r, const CostStructure& costs,
                              const LossAversion& la);

/// argmin over the two actions; ties go to risky.
Action minimizing_action(const ActionValues& v);

}  // namespace recdep
