#include "recdep/uniform_closed_form.hpp"

#include <cmath>
#include <stdexcept>

namespace recdep::uniform {

namespace {

double sq(double x) { return x * x; }

// Loss of a recommendation region of M-length `length` whose human uses
// posterior cutoff `cutoff`: two error triangles with legs length*cutoff and
// length*(1 - cutoff).
double strip_loss(double length, double cutoff, const CostStructure& c) {
    return 0.5 * sq(length) * (c.c_II * sq(cutoff) + c.c_I * sq(1.0 - cutoff));
}

double safe_cutoff(const UniformExample& ex) {
    return ex.costs.c_I / (ex.costs.c_I + ex.costs.c_II + ex.delta_II);
}

}  // namespace

UniformExample::UniformExample(CostStructure costs_, double delta_II_) : costs(costs_), delta_II(delta_II_) {
    if (!std::isfinite(delta_II) || delta_II < 0.0) throw std::invalid_argument("delta_II must be finite and >= 0");
}

Action oracle_action(double h, double m) { return h + m >= 1.0 ? Action::safe : Action::risky; }

double posterior_given_region(double h, double m_lo, double m_hi) {
    if (!(m_lo < m_hi)) throw std::invalid_argument("posterior_given_region: empty interval (m_lo >= m_hi)");
    if (h >= 1.0 - m_lo) return 1.0;
    if (h >= 1.0 - m_hi) return (h - 1.0 + m_hi) / (m_hi - m_lo);
    return 0.0;
}

double solo_threshold(const CostStructure& costs) { return costs.p_bar_star(); }

HumanThresholds response_thresholds(double q_bar, const UniformExample& ex) {
    const double p_star = ex.costs.p_bar_star();
    return HumanThresholds{(1.0 - q_bar) + q_bar * p_star, (1.0 - q_bar) * safe_cutoff(ex)};
}

double expected_loss_two_level(double q_bar, const UniformExample& ex) {
    const double c_I = ex.costs.c_I;
    const double c_II = ex.costs.c_II;
    const double d = ex.delta_II;
    const double s = c_I + c_II + d;
    const double c = c_I + c_II;
    return c_I * (sq((1.0 - q_bar) * (c_II + d) / s) + sq(q_bar * c_II / c)) / 2.0 +
           c_II * (sq((1.0 - q_bar) * c_I / s) + sq(q_bar * c_I / c)) / 2.0;
}

double expected_loss_three_level(double q_low, double q_high, const UniformExample& ex) {
    if (!(0.0 <= q_low && q_low <= q_high && q_high <= 1.0))
        throw std::invalid_argument("three-level thresholds must satisfy 0 <= q_low <= q_high <= 1");
    const double p_star = ex.costs.p_bar_star();
    return strip_loss(q_low, p_star, ex.costs) + strip_loss(q_high - q_low, p_star, ex.costs) +
           strip_loss(1.0 - q_high, safe_cutoff(ex), ex.costs);
}

UniformSolution optimal_threshold_two_level(const UniformExample& ex) {
    const double c_I = ex.costs.c_I;
    const double c_II = ex.costs.c_II;
    const double d = ex.delta_II;
    const double t = c_I * d * d / (c_II * sq(c_I + c_II + d));
    UniformSolution sol;
    sol.q_opt = (1.0 + t) / (2.0 + t);
    const HumanThresholds h = response_thresholds(sol.q_opt, ex);
    sol.h_bar_risky = h.risky;
    sol.h_bar_safe = h.safe;
    sol.expected_loss = expected_loss_two_level(sol.q_opt, ex);
    return sol;
}

ThreeLevelSolution optimal_thresholds_three_level(const UniformExample& ex) {
    const double c_I = ex.costs.c_I;
    const double c_II = ex.costs.c_II;
    const double d = ex.delta_II;
    const double s = c_II * sq(c_I + c_II + d) / ((c_I + c_II) * (sq(c_II + d) + c_I * c_II));
    ThreeLevelSolution sol;
    sol.q_low = 1.0 / (2.0 + s);
    sol.q_high = 2.0 * sol.q_low;
    // Quadratic objective in x = q_low with q_high = 2x.
    const double k = c_I * (sq(c_II + d) + c_I * c_II) / (2.0 * sq(c_I + c_II + d));
    sol.expected_loss = k * sq(1.0 - 2.0 * sol.q_low) + c_I * c_II / (c_I + c_II) * sq(sol.q_low);
    return sol;
}

HumanThresholds equilibrium_thresholds(const UniformExample& ex) {
    return response_thresholds(optimal_threshold_two_level(ex).q_opt, ex);
}

double solo_loss(const CostStructure& costs) { return strip_loss(1.0, costs.p_bar_star(), costs); }

}  // namespace recdep::uniform
