#pragma once

#include "recdep/core_model.hpp"
#include "recdep/rng.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

// Joint law of (Y, H, M) seen through the quantities the decision problem
// needs: the machine posterior Q = P(bad | M), and, for every interval of Q
// (a recommendation region), the human-signal densities restricted to it.

namespace recdep {

/// Set of machine posteriors lo < Q <= hi. An interval with lo <= 0 also
/// contains Q = 0.
struct QInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// A pair of (sub-)probability quantities: joint = P(event), bad = P(event, Y = bad),
/// or the corresponding densities in h.
struct SignalMass {
    double joint = 0.0;
    double bad = 0.0;
};

struct Draw {
    double h = 0.0;
    double m = 0.0;
    Outcome y = Outcome::good;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : std::runtime_error(what), achieved_error_(achieved_error) {}
    double achieved_error() const { return achieved_error_; }

private:
    double achieved_error_;
};

/// One recommendation region {Q in I}, with per-region quantities
/// precomputed. Read-only after construction.
class Region {
public:
    virtual ~Region() = default;

    /// P(Q in I) and P(Q in I, Y = bad).
    virtual SignalMass total() const = 0;

    /// f_H(h) * P(Q in I | H = h) and f_H(h) * P(Q in I, Y = bad | H = h).
    virtual SignalMass density(double h) const = 0;

    /// Integral of density() over (h_lo, h_hi]. The default integrates
    /// numerically; built-in models override with exact expressions.
    virtual SignalMass masses(double h_lo, double h_hi) const;

    /// P(Y = bad | H = h, Q in I); zero where the density vanishes.
    virtual double posterior(double h) const;

    /// Interval of h outside of which posterior() is constant.
    virtual std::pair<double, double> scan_range() const = 0;
};

/// Adaptive Gauss-Kronrod integral of region.density over [h_lo, h_hi]
/// (infinite limits allowed). Throws QuadratureError when the estimated
/// absolute error exceeds `tolerance`.
SignalMass integrate_density(const Region& region, double h_lo, double h_hi, double tolerance = 1e-8);

class SignalModel {
public:
    virtual ~SignalModel() = default;

    virtual std::string name() const = 0;
    virtual nlohmann::json describe() const = 0;

    /// Q = P(Y = bad | M = m).
    virtual double machine_posterior(double m) const = 0;

    /// P(Y = bad | H = h, M = m).
    virtual double joint_posterior(double h, double m) const = 0;

    virtual std::unique_ptr<Region> region(QInterval interval) const = 0;

    virtual Draw sample(Rng& rng) const = 0;

    /// E[min((1 - p(H,M)) c_I, p(H,M) c_II)]: loss with both signals pooled.
    virtual double oracle_loss(const CostStructure& costs) const = 0;

    double human_posterior(double h, QInterval interval) const { return region(interval)->posterior(h); }
    double region_mass(QInterval interval) const { return region(interval)->total().joint; }
};

/// H, M ~ U[0,1] independent, Y = bad iff H + M >= 1.
class UniformModel final : public SignalModel {
public:
    std::string name() const override { return "uniform"; }
    nlohmann::json describe() const override;
    double machine_posterior(double m) const override;
    double joint_posterior(double h, double m) const override;
    std::unique_ptr<Region> region(QInterval interval) const override;
    Draw sample(Rng& rng) const override;
    double oracle_loss(const CostStructure& costs) const override;
};

/// theta ~ Beta(a, b); Y | theta ~ Bernoulli(theta) (bad w.p. theta);
/// H = theta + sigma_h * N(0,1) and M = theta + sigma_m * N(0,1), independent
/// given theta. Posteriors are computed against a fixed Gauss-Legendre
/// discretization of the Beta prior; a, b >= 1 keep the prior density bounded.
class BetaFamilyModel final : public SignalModel {
public:
    struct Params {
        double a = 2.0;
        double b = 3.0;
        double sigma_h = 0.05;
        double sigma_m = 0.1;
    };

    explicit BetaFamilyModel(Params params);

    const Params& params() const { return params_; }
    std::string name() const override { return "beta"; }
    nlohmann::json describe() const override;
    double machine_posterior(double m) const override;
    double joint_posterior(double h, double m) const override;
    std::unique_ptr<Region> region(QInterval interval) const override;
    Draw sample(Rng& rng) const override;
    double oracle_loss(const CostStructure& costs) const override;

    /// Smallest m with machine_posterior(m) >= q, or +-infinity when q is
    /// outside the attainable range. machine_posterior is increasing in m.
    double machine_signal_for(double q) const;

    const std::vector<double>& theta_nodes() const { return theta_; }
    const std::vector<double>& prior_log_weights() const { return log_w_; }

private:
    Params params_;
    std::vector<double> theta_;
    std::vector<double> log_w_;
};

}  // namespace recdep
