#pragma once

#include "recdep/core_model.hpp"

#include <algorithm>
#include <vector>

// Brute-force expected loss on the uniform model: midpoint rule over an
// N x N grid of (h, m), the human applying the cutoff of the recommendation
// to the exact posterior of their region. Shares no code with the solvers.

namespace oracle {

struct Band {
    double m_lo;
    double m_hi;
    double cutoff;
    bool machine_acts = false;
    recdep::Action machine_action = recdep::Action::risky;
};

inline double region_posterior(double h, double lo, double hi) {
    // P(h + M >= 1 | M uniform on (lo, hi] intersected with [0, 1]).
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0);
    const double k = 1.0 - h;
    if (k <= lo) return 1.0;
    if (k >= hi) return 0.0;
    return (hi - k) / (hi - lo);
}

inline double uniform_grid_loss(const std::vector<Band>& bands, const recdep::CostStructure& c, int n = 2000) {
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        const double m = (j + 0.5) / n;
        const Band* band = nullptr;
        for (const auto& b : bands)
            if (m > b.m_lo && m <= b.m_hi) band = &b;
        if (!band) continue;
        for (int i = 0; i < n; ++i) {
            const double h = (i + 0.5) / n;
            recdep::Action a = band->machine_action;
            if (!band->machine_acts)
                a = region_posterior(h, band->m_lo, band->m_hi) <= band->cutoff ? recdep::Action::risky
                                                                                 : recdep::Action::safe;
            const bool bad = h + m >= 1.0;
            if (bad && a == recdep::Action::risky) total += c.c_II;
            if (!bad && a == recdep::Action::safe) total += c.c_I;
        }
    }
    return total / (static_cast<double>(n) * n);
}

}  // namespace oracle
