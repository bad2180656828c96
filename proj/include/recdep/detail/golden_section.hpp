#pragma once

#include <cmath>

namespace recdep {

template <class F>
ScalarMinimum golden_section(F&& f, double a, double b, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    ScalarMinimum best = f1 <= f2 ? ScalarMinimum{x1, f1} : ScalarMinimum{x2, f2};
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
            if (f1 < best.value) best = {x1, f1};
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
            if (f2 < best.value) best = {x2, f2};
        }
    }
    return best;
}

}  // namespace recdep
