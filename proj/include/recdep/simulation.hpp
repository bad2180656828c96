#pragma once

#include "recdep/core_model.hpp"
#include "recdep/numeric_solver.hpp"
#include "recdep/signal_model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

// Monte Carlo replay of the machine -> recommendation -> human -> outcome
// pipeline. Draws are grouped in fixed-size blocks, each with its own RNG
// stream, and all statistics come from integer cell counts, so the report
// does not depend on how many threads ran the blocks.

namespace recdep {

enum class BehaviorKind {
    rational,        // cutoff p* after every recommendation
    ref_dependent,   // response_cutoffs(rd)
    deviation_cost,  // deviation_cost_cutoffs(deviation)
    delegate,        // machine acts on risky/safe, human (p*) on the middle region
    prospect,        // minimizes expected pt_loss with loss aversion lambda
    oracle,          // risky iff P(bad | H, M) <= p*
};

std::string_view to_string(BehaviorKind kind);

struct Behavior {
    BehaviorKind kind = BehaviorKind::ref_dependent;
    ReferenceDependence rd{};
    DeviationCosts deviation{};
    LossAversion loss_aversion{};
};

/// Cutoffs the behavior applies after a risky/safe recommendation. prospect
/// maps to its reference-dependence image; oracle and delegate use p*.
ResponseCutoffs behavior_cutoffs(const Behavior& behavior, const CostStructure& costs);

struct SimConfig {
    std::uint64_t n_samples = 1'000'000;
    std::uint64_t seed = 42;
    Behavior behavior{};
    unsigned threads = 0;         // 0: worker_count()
    bool record_actions = false;  // keep the per-draw action sequence
};

inline constexpr std::uint64_t kSimBlockSize = 65536;

/// Counts per (Y, A, R) cell.
struct CellCounts {
    std::array<std::uint64_t, 2 * 2 * 4> n{};

    static std::size_t index(Outcome y, Action a, Recommendation r) {
        return (static_cast<std::size_t>(y) * 2 + static_cast<std::size_t>(a)) * 4 + static_cast<std::size_t>(r);
    }
    std::uint64_t& at(Outcome y, Action a, Recommendation r) { return n[index(y, a, r)]; }
    std::uint64_t at(Outcome y, Action a, Recommendation r) const { return n[index(y, a, r)]; }
    std::uint64_t total() const;
    CellCounts& operator+=(const CellCounts& other);
};

struct SimReport {
    std::uint64_t n_samples = 0;
    double mean_loss = 0.0;
    double stderr_loss = 0.0;
    double type_I_rate = 0.0;      // P(Y = good, A = safe)
    double type_II_rate = 0.0;     // P(Y = bad, A = risky)
    double adherence_risky = 0.0;  // P(A = risky | R = risky); NaN if R = risky never drawn
    double adherence_safe = 0.0;   // P(A = safe | R = safe); NaN if R = safe never drawn
    CellCounts counts;
    std::vector<Action> actions;  // only with record_actions
};

/// Report statistics from cell counts.
SimReport summarize(const CellCounts& counts, const CostStructure& costs);

SimReport simulate(const SignalModel& model, const Policy& policy, const CostStructure& costs, const SimConfig& cfg);

enum class SweepAxis { delta_I, delta_II, lambda, q_bar };

std::string_view to_string(SweepAxis axis);

enum class Levels { two, three, delegate };

struct SweepRequest {
    SweepAxis axis = SweepAxis::delta_II;
    std::vector<double> values;
    Levels levels = Levels::two;
    std::optional<Policy> fixed_policy;  // nullopt: optimize at every grid point
    GridSpec grid{};
};

struct SweepRow {
    double axis_value = 0.0;
    Policy policy;
    ResponseCutoffs cutoffs;
    double analytic_loss = 0.0;
    SimReport mc;
};

/// One row per grid value. The axis overrides the matching parameter of
/// cfg.behavior: delta_I / delta_II set rd (ref_dependent), lambda sets the
/// loss aversion (prospect), q_bar fixes a two-level policy. Every row uses
/// cfg.seed. Throws std::invalid_argument on an empty grid.
std::vector<SweepRow> sweep(const SignalModel& model, const CostStructure& costs, const SweepRequest& request,
                            const SimConfig& cfg);

/// Loss-minimizing policy for the behavior, or the policy's own loss if fixed.
struct PolicyEvaluation {
    Policy policy;
    double loss = 0.0;
    bool multimodal = false;
};

PolicyEvaluation evaluate_policy(const SignalModel& model, const CostStructure& costs, const Behavior& behavior,
                                 Levels levels, const std::optional<Policy>& fixed, const GridSpec& grid = {});

}  // namespace recdep
