#pragma once

#include "recdep/core_model.hpp"

#include <utility>

// Exact solution of the uniform example: H, M ~ U[0,1] independent and
// Y = bad iff H + M >= 1. Only Type-II reference dependence (delta_II) is
// modelled here; delta_I is fixed at zero.

namespace recdep::uniform {

struct UniformExample {
    CostStructure costs;
    double delta_II = 0.0;

    UniformExample() = default;
    UniformExample(CostStructure costs_, double delta_II_);
};

struct HumanThresholds {
    double risky = 0.0;  // h cutoff after a risky recommendation
    double safe = 0.0;   // h cutoff after a safe recommendation
};

struct UniformSolution {
    double q_opt = 0.5;
    double h_bar_risky = 0.0;
    double h_bar_safe = 0.0;
    double expected_loss = 0.0;
};

struct ThreeLevelSolution {
    double q_low = 0.0;
    double q_high = 0.0;
    double expected_loss = 0.0;
};

Action oracle_action(double h, double m);

/// P(Y = bad | H = h, M in (m_lo, m_hi]).
double posterior_given_region(double h, double m_lo, double m_hi);

/// Cutoff shared by the human acting alone and the machine acting alone.
double solo_threshold(const CostStructure& costs);

/// Signal cutoffs of the best response to a threshold recommendation q_bar.
HumanThresholds response_thresholds(double q_bar, const UniformExample& ex);

/// Sum of the four error triangles for threshold q_bar.
double expected_loss_two_level(double q_bar, const UniformExample& ex);

/// Three-level loss for arbitrary thresholds q_low <= q_high (regions of
/// lengths q_low, q_high - q_low, 1 - q_high; the middle uses cutoff p*).
double expected_loss_three_level(double q_low, double q_high, const UniformExample& ex);

UniformSolution optimal_threshold_two_level(const UniformExample& ex);
ThreeLevelSolution optimal_thresholds_three_level(const UniformExample& ex);
HumanThresholds equilibrium_thresholds(const UniformExample& ex);

/// Loss of each agent deciding alone on its own signal with cutoff p*.
double solo_loss(const CostStructure& costs);

}  // namespace recdep::uniform
