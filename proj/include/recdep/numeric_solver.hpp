#pragma once

#include "recdep/core_model.hpp"
#include "recdep/signal_model.hpp"

#include <variant>
#include <vector>

// Evaluation and optimization of threshold recommendation policies for any
// SignalModel. A policy partitions the machine posterior Q into regions; in
// each region the decision-maker acts on P(bad | H, region) with the cutoff
// belonging to the recommendation they received.

namespace recdep {

/// Recommend risky iff Q <= q_bar.
struct TwoLevelPolicy {
    double q_bar = 0.5;
};

/// risky for Q <= q_low, dont_know for q_low < Q <= q_high, safe above.
struct ThreeLevelPolicy {
    double q_low = 1.0 / 3.0;
    double q_high = 2.0 / 3.0;
};

/// Same partition as ThreeLevelPolicy, but the machine acts directly in the
/// outer regions and hands the middle region to the human.
struct DelegationPolicy {
    double q_low = 1.0 / 3.0;
    double q_high = 2.0 / 3.0;
};

using Policy = std::variant<TwoLevelPolicy, ThreeLevelPolicy, DelegationPolicy>;

/// Throws std::invalid_argument unless thresholds lie in [0,1] and are ordered.
void validate(const Policy& policy);

Recommendation recommend(const Policy& policy, double q);

struct RecommendationRegion {
    Recommendation rec;
    QInterval interval;
};

/// The policy's regions in increasing Q order.
std::vector<RecommendationRegion> regions_of(const Policy& policy);

/// Cutoff applied after recommendation r. dont_know and delegate carry no
/// reference point, so the undistorted cutoff p* applies.
double cutoff_for(Recommendation r, const CostStructure& costs, const ResponseCutoffs& cutoffs);

Action best_response(const SignalModel& model, double h, Recommendation r, const Policy& policy,
                     const CostStructure& costs, const ResponseCutoffs& cutoffs);

/// Regions lighter than this contribute nothing.
inline constexpr double kDegenerateMass = 1e-12;

/// Outcome of a decision-maker acting on `cutoff` inside one region.
struct RegionEvaluation {
    double mass = 0.0;            // P(region)
    double bad_mass = 0.0;        // P(region, bad)
    double risky_mass = 0.0;      // P(region, A = risky)
    double risky_bad_mass = 0.0;  // P(region, A = risky, bad)
    double loss = 0.0;            // E[l(Y, A); region]
    bool degenerate = false;
};

struct ScanOptions {
    int scan_points = 65;
};

/// Splits the human signal at the points where posterior <= cutoff switches
/// and sums exact region masses over the resulting pieces.
RegionEvaluation evaluate_region(const Region& region, double cutoff, const CostStructure& costs,
                                 const ScanOptions& scan = {});

/// Expected loss E[l(Y, A)] of the human's best response to `policy`.
/// DelegationPolicy is evaluated with delegate_pipeline.
double expected_loss(const SignalModel& model, const Policy& policy, const CostStructure& costs,
                     const ResponseCutoffs& cutoffs);
double expected_loss(const SignalModel& model, const Policy& policy, const CostStructure& costs,
                     const ReferenceDependence& rd);

/// Machine acts in the outer regions; the human decides in the middle one
/// with cutoff p*.
double delegate_pipeline(const SignalModel& model, const ThreeLevelPolicy& policy, const CostStructure& costs);

struct GridSpec {
    int points = 2001;        // 1-D grid over [0,1]
    int points_2d = 101;      // per-axis grid for two-threshold policies
    double refine_tol = 1e-10;
    double multimodal_tol = 1e-9;
};

struct OptimizationResult {
    Policy argmin;
    double value = 0.0;
    bool multimodal_flag = false;
    double grid_resolution = 0.0;
};

OptimizationResult optimize_two_level(const SignalModel& model, const CostStructure& costs,
                                      const ResponseCutoffs& cutoffs, const GridSpec& grid = {});
OptimizationResult optimize_two_level(const SignalModel& model, const CostStructure& costs,
                                      const ReferenceDependence& rd, const GridSpec& grid = {});

OptimizationResult optimize_three_level(const SignalModel& model, const CostStructure& costs,
                                        const ResponseCutoffs& cutoffs, const GridSpec& grid = {});
OptimizationResult optimize_three_level(const SignalModel& model, const CostStructure& costs,
                                        const ReferenceDependence& rd, const GridSpec& grid = {});

/// Thresholds of the loss-minimizing DelegationPolicy.
OptimizationResult optimize_delegation(const SignalModel& model, const CostStructure& costs,
                                       const GridSpec& grid = {});

struct Adherence {
    double prob_risky = 0.0;  // P(A = risky | R = risky)
    double prob_safe = 0.0;   // P(A = safe | R = safe)
};

/// Requires both recommendation regions to carry positive mass.
Adherence adherence(const SignalModel& model, const TwoLevelPolicy& policy, const CostStructure& costs,
                    const ResponseCutoffs& cutoffs);
Adherence adherence(const SignalModel& model, const TwoLevelPolicy& policy, const CostStructure& costs,
                    const ReferenceDependence& rd);

struct Benchmarks {
    double oracle_loss = 0.0;
    double human_alone_loss = 0.0;
    double machine_alone_loss = 0.0;
    double no_recommendation_loss = 0.0;
};

Benchmarks benchmarks(const SignalModel& model, const CostStructure& costs);

/// Golden-section minimization of f on [a, b] until the bracket is narrower
/// than tol. Returns the best point seen.
struct ScalarMinimum {
    double x = 0.0;
    double value = 0.0;
};
template <class F>
ScalarMinimum golden_section(F&& f, double a, double b, double tol);

}  // namespace recdep

#include "recdep/detail/golden_section.hpp"
