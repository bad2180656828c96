#include "recdep/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace recdep {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

bool is_reference(Recommendation r) {
    return r == Recommendation::risky || r == Recommendation::safe;
}

}  // namespace

std::string_view to_string(Outcome y) { return y == Outcome::good ? "good" : "bad"; }

std::string_view to_string(Action a) { return a == Action::safe ? "safe" : "risky"; }

std::string_view to_string(Recommendation r) {
    switch (r) {
        case Recommendation::risky: return "risky";
        case Recommendation::safe: return "safe";
        case Recommendation::dont_know: return "dont_know";
        case Recommendation::delegate: return "delegate";
    }
    return "?";
}

CostStructure::CostStructure(double c_I_, double c_II_) : c_I(c_I_), c_II(c_II_) {
    require(std::isfinite(c_I) && c_I > 0.0, "c_I must be a positive finite number");
    require(std::isfinite(c_II) && c_II > 0.0, "c_II must be a positive finite number");
}

ReferenceDependence::ReferenceDependence(double delta_I_, double delta_II_)
    : delta_I(delta_I_), delta_II(delta_II_) {
    require(std::isfinite(delta_I) && delta_I >= 0.0, "delta_I must be finite and >= 0");
    require(std::isfinite(delta_II) && delta_II >= 0.0, "delta_II must be finite and >= 0");
}

DeviationCosts::DeviationCosts(double d_risky_, double d_safe_) : d_risky(d_risky_), d_safe(d_safe_) {
    require(std::isfinite(d_risky) && d_risky >= 0.0, "d_risky must be finite and >= 0");
    require(std::isfinite(d_safe) && d_safe >= 0.0, "d_safe must be finite and >= 0");
}

LossAversion::LossAversion(double lambda_) : lambda(lambda_) {
    require(std::isfinite(lambda) && lambda >= 1.0, "lambda must be finite and >= 1");
}

double base_loss(Outcome y, Action a, const CostStructure& costs) {
    if (y == Outcome::good && a == Action::safe) return costs.c_I;
    if (y == Outcome::bad && a == Action::risky) return costs.c_II;
    return 0.0;
}

double decision_loss(Outcome y, Action a, Recommendation r, const CostStructure& costs,
                     const ReferenceDependence& rd) {
    require(is_reference(r), "decision_loss needs a risky or safe recommendation");
    double loss = base_loss(y, a, costs);
    if (y == Outcome::good && a == Action::safe && r == Recommendation::risky) loss += rd.delta_I;
    if (y == Outcome::bad && a == Action::risky && r == Recommendation::safe) loss += rd.delta_II;
    return loss;
}

double pt_loss(Outcome y, Recommendation r, Action a, const CostStructure& costs, const LossAversion& la) {
    require(is_reference(r), "pt_loss needs a risky or safe recommendation");
    const Action reference = r == Recommendation::risky ? Action::risky : Action::safe;
    const double diff = base_loss(y, a, costs) - base_loss(y, reference, costs);
    return diff > 0.0 ? la.lambda * diff : diff;
}

ReferenceDependence pt_to_refdep(const LossAversion& la, const CostStructure& costs) {
    require(la.lambda >= 1.0, "lambda must be >= 1");
    return ReferenceDependence{(la.lambda - 1.0) * costs.c_I, (la.lambda - 1.0) * costs.c_II};
}

ResponseCutoffs response_cutoffs(const CostStructure& costs, const ReferenceDependence& rd) {
    const double c_I = costs.c_I;
    const double c_II = costs.c_II;
    return ResponseCutoffs{(c_I + rd.delta_I) / (c_I + c_II + rd.delta_I),
                           c_I / (c_I + c_II + rd.delta_II)};
}

ResponseCutoffs deviation_cost_cutoffs(const CostStructure& costs, const DeviationCosts& d) {
    const double total = costs.c_I + costs.c_II;
    return ResponseCutoffs{std::min((costs.c_I + d.d_risky) / total, 1.0),
                           std::max((costs.c_I - d.d_safe) / total, 0.0)};
}

Action act_on_posterior(double p, double cutoff) { return p <= cutoff ? Action::risky : Action::safe; }

ActionValues expected_decision_loss(double p, Recommendation r, const CostStructure& costs,
                                    const ReferenceDependence& rd) {
    require(is_reference(r), "expected_decision_loss needs a risky or safe recommendation");
    ActionValues v;
    v.risky = p * decision_loss(Outcome::bad, Action::risky, r, costs, rd) +
              (1.0 - p) * decision_loss(Outcome::good, Action::risky, r, costs, rd);
    v.safe = p * decision_loss(Outcome::bad, Action::safe, r, costs, rd) +
             (1.0 - p) * decision_loss(Outcome::good, Action::safe, r, costs, rd);
    return v;
}

ActionValues expected_pt_loss(double p, Recommendation r, const CostStructure& costs, const LossAversion& la) {
    ActionValues v;
    v.risky = p * pt_loss(Outcome::bad, r, Action::risky, costs, la) +
              (1.0 - p) * pt_loss(Outcome::good, r, Action::risky, costs, la);
    v.safe = p * pt_loss(Outcome::bad, r, Action::safe, costs, la) +
             (1.0 - p) * pt_loss(Outcome::good, r, Action::safe, costs, la);
    return v;
}

Action minimizing_action(const ActionValues& v) { return v.risky <= v.safe ? Action::risky : Action::safe; }

}  // namespace recdep
