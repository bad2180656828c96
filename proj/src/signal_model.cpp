#include "recdep/signal_model.hpp"

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

namespace recdep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest x in the bracket with pred(x) true, for pred monotone false -> true.
template <class Pred>
double bisect_switch(Pred&& pred, double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// Finds the crossing point of an increasing function over the real line,
// expanding the bracket outward. Returns +-inf if no crossing within 1e8.
template <class F>
double increasing_crossing(F&& f, double level, double lo, double hi) {
    while (f(lo) >= level) {
        if (lo < -1e8) return -kInf;
        lo = 2.0 * lo - 1.0;
    }
    while (f(hi) < level) {
        if (hi > 1e8) return kInf;
        hi = 2.0 * hi + 1.0;
    }
    return bisect_switch([&](double x) { return f(x) >= level; }, lo, hi);
}

// Weighted mean of `values` under weights exp(log_weights), stable for
// widely spread exponents. Returns 0 if every weight is zero.
double log_weighted_mean(const std::vector<double>& log_weights, const std::vector<double>& values) {
    double top = -kInf;
    for (double lw : log_weights) top = std::max(top, lw);
    if (!std::isfinite(top)) return 0.0;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double w = std::exp(log_weights[k] - top);
        num += w * values[k];
        den += w;
    }
    return num / den;
}

}  // namespace

// ---------------------------------------------------------------------------
// Region defaults

SignalMass Region::masses(double h_lo, double h_hi) const {
    if (!(h_lo < h_hi)) return {};
    return integrate_density(*this, h_lo, h_hi);
}

double Region::posterior(double h) const {
    const SignalMass d = density(h);
    if (!(d.joint > 0.0)) return 0.0;
    return std::clamp(d.bad / d.joint, 0.0, 1.0);
}

SignalMass integrate_density(const Region& region, double h_lo, double h_hi, double tolerance) {
    // Pieces split at the scan range ends, where densities may jump; beyond
    // half a range width outside them the density is negligible.
    const auto [s_lo, s_hi] = region.scan_range();
    const double width = s_hi - s_lo;
    const double cuts[] = {s_lo - 0.5 * width, s_lo, s_hi, s_hi + 0.5 * width};
    SignalMass out;
    for (int k = 0; k < 3; ++k) {
        const double a = std::max(h_lo, cuts[k]);
        const double b = std::min(h_hi, cuts[k + 1]);
        if (!(a < b)) continue;
        const int panels = std::clamp(static_cast<int>(std::ceil(32.0 * (b - a) / width)), 1, 64);
        out.joint += detail::panel_integral([&](double h) { return region.density(h).joint; }, a, b, panels,
                                            tolerance / 3.0, "region density", 15);
        out.bad += detail::panel_integral([&](double h) { return region.density(h).bad; }, a, b, panels,
                                          tolerance / 3.0, "region bad density", 15);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Uniform example

namespace {

class UniformRegion final : public Region {
public:
    explicit UniformRegion(QInterval interval)
        : lo_(std::clamp(interval.lo, 0.0, 1.0)), hi_(std::clamp(interval.hi, 0.0, 1.0)) {
        if (hi_ < lo_) hi_ = lo_;
    }

    SignalMass total() const override {
        const double len = hi_ - lo_;
        // P(M in I, H + M >= 1) = integral over m in I of m.
        return {len, 0.5 * (hi_ * hi_ - lo_ * lo_)};
    }

    SignalMass density(double h) const override {
        if (h < 0.0 || h > 1.0) return {};
        const double len = hi_ - lo_;
        return {len, std::clamp(h - (1.0 - hi_), 0.0, len)};
    }

    SignalMass masses(double h_lo, double h_hi) const override {
        const double a = std::clamp(h_lo, 0.0, 1.0);
        const double b = std::clamp(h_hi, 0.0, 1.0);
        if (!(a < b)) return {};
        const double len = hi_ - lo_;
        return {len * (b - a), bad_antiderivative(b) - bad_antiderivative(a)};
    }

    double posterior(double h) const override {
        if (!(hi_ > lo_) || h < 0.0 || h > 1.0) return 0.0;
        if (h >= 1.0 - lo_) return 1.0;
        if (h >= 1.0 - hi_) return (h - 1.0 + hi_) / (hi_ - lo_);
        return 0.0;
    }

    std::pair<double, double> scan_range() const override { return {0.0, 1.0}; }

private:
    // Antiderivative of clamp(h - (1 - hi), 0, len).
    double bad_antiderivative(double h) const {
        const double start = 1.0 - hi_;
        const double len = hi_ - lo_;
        const double x = h - start;
        if (x <= 0.0) return 0.0;
        if (x <= len) return 0.5 * x * x;
        return 0.5 * len * len + len * (x - len);
    }

    double lo_;
    double hi_;
};

}  // namespace

nlohmann::json UniformModel::describe() const { return {{"kind", "uniform"}}; }

double UniformModel::machine_posterior(double m) const { return std::clamp(m, 0.0, 1.0); }

double UniformModel::joint_posterior(double h, double m) const { return h + m >= 1.0 ? 1.0 : 0.0; }

std::unique_ptr<Region> UniformModel::region(QInterval interval) const {
    return std::make_unique<UniformRegion>(interval);
}

Draw UniformModel::sample(Rng& rng) const {
    Draw d;
    d.h = uniform01(rng);
    d.m = uniform01(rng);
    d.y = d.h + d.m >= 1.0 ? Outcome::bad : Outcome::good;
    return d;
}

double UniformModel::oracle_loss(const CostStructure& costs) const {
    // The pooled posterior is 1 on {H + M >= 1} and 0 elsewhere, each of
    // probability 1/2.
    const double on_bad = std::min((1.0 - 1.0) * costs.c_I, 1.0 * costs.c_II);
    const double on_good = std::min((1.0 - 0.0) * costs.c_I, 0.0 * costs.c_II);
    return 0.5 * on_bad + 0.5 * on_good;
}

// ---------------------------------------------------------------------------
// Beta family

namespace {

constexpr int kPanels = 16;
using Legendre8 = boost::math::quadrature::gauss<double, 8>;

class BetaRegion final : public Region {
public:
    BetaRegion(const BetaFamilyModel& model, QInterval interval)
        : theta_(model.theta_nodes()), sigma_h_(model.params().sigma_h) {
        const double sigma_m = model.params().sigma_m;
        const double m_lo = interval.lo <= 0.0 ? -kInf : model.machine_signal_for(interval.lo);
        const double m_hi = interval.hi >= 1.0 ? kInf : model.machine_signal_for(interval.hi);
        const auto& log_w = model.prior_log_weights();
        log_r_.resize(theta_.size());
        weight_.resize(theta_.size());
        for (std::size_t k = 0; k < theta_.size(); ++k) {
            const double p = m_lo < m_hi ? detail::normal_interval((m_lo - theta_[k]) / sigma_m,
                                                                   (m_hi - theta_[k]) / sigma_m)
                                         : 0.0;
            log_r_[k] = p > 0.0 ? log_w[k] + std::log(p) : -kInf;
            weight_[k] = std::exp(log_r_[k]);
            total_.joint += weight_[k];
            total_.bad += weight_[k] * theta_[k];
        }
    }

    SignalMass total() const override { return total_; }

    SignalMass density(double h) const override {
        SignalMass out;
        const double norm = 1.0 / (sigma_h_ * std::sqrt(2.0 * std::numbers::pi));
        for (std::size_t k = 0; k < theta_.size(); ++k) {
            const double z = (h - theta_[k]) / sigma_h_;
            const double w = weight_[k] * norm * std::exp(-0.5 * z * z);
            out.joint += w;
            out.bad += w * theta_[k];
        }
        return out;
    }

    SignalMass masses(double h_lo, double h_hi) const override {
        SignalMass out;
        if (!(h_lo < h_hi)) return out;
        for (std::size_t k = 0; k < theta_.size(); ++k) {
            const double p =
                detail::normal_interval((h_lo - theta_[k]) / sigma_h_, (h_hi - theta_[k]) / sigma_h_);
            out.joint += weight_[k] * p;
            out.bad += weight_[k] * p * theta_[k];
        }
        return out;
    }

    double posterior(double h) const override {
        std::vector<double> lw(theta_.size());
        for (std::size_t k = 0; k < theta_.size(); ++k) {
            const double z = (h - theta_[k]) / sigma_h_;
            lw[k] = log_r_[k] - 0.5 * z * z;
        }
        return log_weighted_mean(lw, theta_);
    }

    std::pair<double, double> scan_range() const override { return {-8.0 * sigma_h_, 1.0 + 8.0 * sigma_h_}; }

private:
    const std::vector<double>& theta_;
    double sigma_h_;
    std::vector<double> log_r_;
    std::vector<double> weight_;
    SignalMass total_;
};

}  // namespace

BetaFamilyModel::BetaFamilyModel(Params params) : params_(params) {
    if (!(std::isfinite(params_.a) && params_.a >= 1.0) || !(std::isfinite(params_.b) && params_.b >= 1.0))
        throw std::invalid_argument("beta model: a and b must be finite and >= 1");
    if (!(std::isfinite(params_.sigma_h) && params_.sigma_h > 0.0) ||
        !(std::isfinite(params_.sigma_m) && params_.sigma_m > 0.0))
        throw std::invalid_argument("beta model: sigma_h and sigma_m must be positive and finite");

    const double log_beta_fn =
        std::lgamma(params_.a) + std::lgamma(params_.b) - std::lgamma(params_.a + params_.b);
    const auto& x = Legendre8::abscissa();
    const auto& w = Legendre8::weights();
    const double width = 1.0 / kPanels;
    for (int p = 0; p < kPanels; ++p) {
        const double mid = (p + 0.5) * width;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (double sign : {-1.0, 1.0}) {
                const double t = mid + sign * 0.5 * width * x[i];
                theta_.push_back(t);
                log_w_.push_back(std::log(0.5 * width * w[i]) + (params_.a - 1.0) * std::log(t) +
                                 (params_.b - 1.0) * std::log1p(-t) - log_beta_fn);
            }
        }
    }
    // Renormalize so the discretized prior is a probability distribution.
    double top = -kInf;
    for (double v : log_w_) top = std::max(top, v);
    double sum = 0.0;
    for (double v : log_w_) sum += std::exp(v - top);
    const double log_norm = top + std::log(sum);
    for (double& v : log_w_) v -= log_norm;
}

nlohmann::json BetaFamilyModel::describe() const {
    return {{"kind", "beta"},
            {"a", params_.a},
            {"b", params_.b},
            {"sigma_h", params_.sigma_h},
            {"sigma_m", params_.sigma_m}};
}

double BetaFamilyModel::machine_posterior(double m) const {
    std::vector<double> lw(theta_.size());
    for (std::size_t k = 0; k < theta_.size(); ++k) {
        const double z = (m - theta_[k]) / params_.sigma_m;
        lw[k] = log_w_[k] - 0.5 * z * z;
    }
    return log_weighted_mean(lw, theta_);
}

double BetaFamilyModel::joint_posterior(double h, double m) const {
    std::vector<double> lw(theta_.size());
    for (std::size_t k = 0; k < theta_.size(); ++k) {
        const double zh = (h - theta_[k]) / params_.sigma_h;
        const double zm = (m - theta_[k]) / params_.sigma_m;
        lw[k] = log_w_[k] - 0.5 * (zh * zh + zm * zm);
    }
    return log_weighted_mean(lw, theta_);
}

double BetaFamilyModel::machine_signal_for(double q) const {
    if (q <= theta_.front()) return -kInf;
    if (q >= theta_.back()) return kInf;
    return increasing_crossing([&](double m) { return machine_posterior(m); }, q, -1.0, 2.0);
}

std::unique_ptr<Region> BetaFamilyModel::region(QInterval interval) const {
    return std::make_unique<BetaRegion>(*this, interval);
}

Draw BetaFamilyModel::sample(Rng& rng) const {
    std::gamma_distribution<double> ga(params_.a, 1.0);
    std::gamma_distribution<double> gb(params_.b, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    const double theta = x / (x + y);
    Draw d;
    d.y = uniform01(rng) < theta ? Outcome::bad : Outcome::good;
    d.h = theta + params_.sigma_h * noise(rng);
    d.m = theta + params_.sigma_m * noise(rng);
    return d;
}

double BetaFamilyModel::oracle_loss(const CostStructure& costs) const {
    const double p_star = costs.p_bar_star();
    const double norm = 1.0 / (params_.sigma_h * std::sqrt(2.0 * std::numbers::pi));
    // For fixed h the pooled posterior increases in m: act risky below m*(h).
    auto integrand = [&](double h) {
        const double m_star =
            increasing_crossing([&](double m) { return joint_posterior(h, m); }, p_star, -1.0, 2.0);
        double acc = 0.0;
        for (std::size_t k = 0; k < theta_.size(); ++k) {
            const double zh = (h - theta_[k]) / params_.sigma_h;
            const double u = std::exp(log_w_[k] - 0.5 * zh * zh) * norm;
            if (u == 0.0) continue;
            const double below = detail::normal_interval(-kInf, (m_star - theta_[k]) / params_.sigma_m);
            acc += u * (costs.c_II * theta_[k] * below + costs.c_I * (1.0 - theta_[k]) * (1.0 - below));
        }
        return acc;
    };
    // Beyond 10 sigma_h of [0,1] the signal density is below exp(-50).
    const double lo = -10.0 * params_.sigma_h;
    const double hi = 1.0 + 10.0 * params_.sigma_h;
    const int panels = std::clamp(static_cast<int>(std::ceil((hi - lo) / params_.sigma_h)), 8, 64);
    return detail::panel_integral(integrand, lo, hi, panels, 1e-9, "oracle loss");
}

}  // namespace recdep
