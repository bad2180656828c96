#pragma once

#include "recdep/signal_model.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace recdep::detail {

/// Adaptive 15-point Gauss-Kronrod; throws QuadratureError if the error
/// estimate exceeds abs_tolerance.
template <class F>
double adaptive_integral(F&& f, double a, double b, double abs_tolerance, const char* what, unsigned max_depth = 15) {
    if (a == b) return 0.0;
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, 1e-11, &error, &l1);
    if (!std::isfinite(value) || error > abs_tolerance) {
        std::ostringstream msg;
        msg << what << ": quadrature did not converge (estimated error " << error << ", tolerance "
            << abs_tolerance << ")";
        throw QuadratureError(msg.str(), error);
    }
    return value;
}

/// adaptive_integral on [a, b], halving the interval on failure up to `splits` times.
template <class F>
double split_integral(F& f, double a, double b, double abs_tolerance, const char* what, unsigned max_depth,
                      int splits) {
    try {
        return adaptive_integral(f, a, b, abs_tolerance, what, max_depth);
    } catch (const QuadratureError&) {
        if (splits == 0) throw;
    }
    const double mid = 0.5 * (a + b);
    return split_integral(f, a, mid, abs_tolerance, what, max_depth, splits - 1) +
           split_integral(f, mid, b, abs_tolerance, what, max_depth, splits - 1);
}

/// adaptive_integral summed over `panels` equal sub-intervals of a finite range.
template <class F>
double panel_integral(F&& f, double a, double b, int panels, double abs_tolerance, const char* what,
                      unsigned max_depth = 10) {
    double total = 0.0;
    const double width = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + width * i;
        const double hi = i + 1 == panels ? b : lo + width;
        total += split_integral(f, lo, hi, abs_tolerance / panels, what, max_depth, 8);
    }
    return total;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// P(za < Z <= zb) for standard normal Z, accurate in both tails.
inline double normal_interval(double za, double zb) {
    if (!(za < zb)) return 0.0;
    const double r = 1.0 / std::sqrt(2.0);
    if (za > 0.0) return 0.5 * (std::erfc(za * r) - std::erfc(zb * r));
    if (zb < 0.0) return 0.5 * (std::erfc(-zb * r) - std::erfc(-za * r));
    return 1.0 - 0.5 * (std::erfc(-za * r) + std::erfc(zb * r));
}

}  // namespace recdep::detail
