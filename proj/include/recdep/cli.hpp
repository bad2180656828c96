#pragma once

#include "recdep/core_model.hpp"
#include "recdep/numeric_solver.hpp"
#include "recdep/signal_model.hpp"
#include "recdep/simulation.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

// Configuration, commands and serialization behind the `recdep` tool.
// Exit codes: 0 ok, 1 verification or analytic mismatch, 2 configuration
// error, 3 numeric failure.

namespace recdep::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_config = 2, exit_numeric = 3 };

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Format { json, csv };

struct ModelSpec {
    std::string kind = "uniform";  // uniform | beta
    BetaFamilyModel::Params beta{};

    std::unique_ptr<SignalModel> build() const;
};

struct PolicySpec {
    Levels levels = Levels::two;
    std::optional<Policy> fixed;  // nullopt: optimize
};

struct SimSpec {
    std::uint64_t n = 1'000'000;
    std::uint64_t seed = 42;
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::delta_II;
    std::vector<double> values;
};

struct OutputSpec {
    std::string path;  // empty: stdout
    std::optional<Format> format;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    ModelSpec model;
    CostStructure costs;
    Behavior behavior;
    PolicySpec policy;
    SimSpec sim;
    std::optional<SweepSpec> sweep;
    OutputSpec output;
};

/// Validates the whole document before anything is computed.
RunConfig parse_config(const nlohmann::json& doc);

/// Reads and parses a config file; malformed JSON is a ConfigError.
RunConfig load_config(const std::string& path);

struct CommandResult {
    nlohmann::json record;
    int exit_code = exit_ok;
};

CommandResult cmd_solve(const RunConfig& cfg, bool cross_check);
CommandResult cmd_simulate(const RunConfig& cfg, bool expect_analytic);

/// record is the array of sweep rows; see sweep_csv for the column set.
CommandResult cmd_sweep(const RunConfig& cfg);

/// Runs the selected properties (all if `only` is empty). Unknown ids are a ConfigError.
CommandResult cmd_verify(const std::vector<std::string>& only);

inline const std::vector<std::string> kSweepColumns{
    "axis_value", "q_opt",   "q_low",  "q_high",          "p_bar_risky",   "p_bar_safe",
    "analytic_loss", "mc_loss", "mc_stderr", "adherence_risky", "adherence_safe"};

/// Header plus one row per sweep record. Missing or non-finite values are empty cells.
std::string sweep_csv(const nlohmann::json& rows);

/// JSON text with every floating-point number printed to 17 significant
/// digits; non-finite numbers become null.
std::string dump_json(const nlohmann::json& value, int indent = 2);

/// Two-column key,value CSV of a nested record, keys joined with '.'.
std::string flat_csv(const nlohmann::json& record);

/// Number formatted to 17 significant digits.
std::string format_number(double x);

/// Entry point of the tool. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace recdep::cli
