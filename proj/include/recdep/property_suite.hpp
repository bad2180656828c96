#pragma once

#include "recdep/core_model.hpp"
#include "recdep/signal_model.hpp"

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

// Executable checks of the model's propositions and remarks. Failures are
// reported, never thrown.

namespace recdep {

/// One tested inequality. pass <=> violation <= tolerance.
struct PropertyCheck {
    std::string name;
    double violation = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct PropertyReport {
    std::string id;
    std::string title;
    nlohmann::json grid;
    std::vector<PropertyCheck> checks;
    nlohmann::json witness;
    // Taken from the check with the largest violation relative to its tolerance.
    double worst_violation = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

nlohmann::json to_json(const PropertyReport& report);

struct PropertyGrids {
    std::vector<CostStructure> costs{{1, 1}, {1, 2}, {2, 1}, {1, 5}};
    std::vector<double> deltas{0.0, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> large_deltas{10.0, 1e2, 1e4, 1e6};
    std::vector<double> lambdas{1.0, 1.25, 1.5, 2.0, 5.0};
    int posterior_points = 1000;
    CostStructure reference_costs{1, 2};
    double fixed_q_bar = 0.5;
    BetaFamilyModel::Params beta{};
    // Witness for a harmful fixed recommendation: weak machine signal, strong reference dependence.
    BetaFamilyModel::Params weak_machine{2.0, 3.0, 0.05, 1.0};
    double remark2_delta_II = 50.0;
};

PropertyReport check_remark1(const PropertyGrids& grids = {});
PropertyReport check_remark2(const PropertyGrids& grids = {});
PropertyReport check_prop1(const PropertyGrids& grids = {});
PropertyReport check_prop2(const PropertyGrids& grids = {});
PropertyReport check_prop3(const PropertyGrids& grids = {});
PropertyReport check_prop4(const PropertyGrids& grids = {});
PropertyReport check_prop5(const PropertyGrids& grids = {});

const std::vector<std::string>& property_ids();

/// Throws std::invalid_argument for an unknown id.
PropertyReport run_property(std::string_view id, const PropertyGrids& grids = {});

}  // namespace recdep
