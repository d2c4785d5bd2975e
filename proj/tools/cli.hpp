#ifndef PRICEBAND_TOOLS_CLI_HPP
#define PRICEBAND_TOOLS_CLI_HPP

#include "priceband/errors.hpp"
#include "priceband/model.hpp"
#include "priceband/policy.hpp"
#include "priceband/simulator.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace priceband::cli {

/// Configuration document failed to parse or validate.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct GridSpec {
    double min;
    double max;
    long count;
};

struct SimulateSpec {
    long n_paths = 10000;
    double dt = 1e-3;
    double horizon = 300.0;
    std::uint64_t seed = 0;
    std::optional<double> initial_x;           ///< defaults to the solved restart state
    std::optional<PolicyThresholds> policy;    ///< defaults to the solved optimal triple
    std::optional<std::string> cost_model;     ///< "fixed" | "state"; default by lambda
    int threads = 1;
    long max_interventions = 1000000;
};

/// Parsed configuration document. Block layout:
///   model    (required): rho, sigma, b, delta, c, and optional mu, lambda
///   solve    (optional): mode = auto|base|extended, tol
///   grid     (optional): min, max, count            (value-curve, qvi-check)
///   costs    (optional): ascending array            (sweep-cost)
///   simulate (optional): n_paths, dt, horizon, seed, initial_x, policy,
///                        cost_model, threads, max_interventions
/// Unknown keys are rejected. Keys emitted by `solve` output documents
/// (coefficients, solution, c_bar, condition_report) are accepted and ignored
/// so that a solve document round-trips as a config.
struct RunConfig {
    ModelParams model{};
    std::string solve_mode = "auto";
    double tol = 1e-6;
    std::optional<GridSpec> grid;
    std::vector<double> costs;
    SimulateSpec simulate;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

/// Built-in parameter presets problem1..problem4.
RunConfig preset(const std::string& name);

/// True when the extended solver handles these parameters (mu or lambda nonzero).
bool wants_extended(const RunConfig& config);

nlohmann::json run_solve(const RunConfig& config, bool force_extended);
std::string run_value_curve(const RunConfig& config);
std::string run_sweep_cost(const RunConfig& config);
nlohmann::json run_simulate(const RunConfig& config);

struct QviOutcome {
    std::string csv;
    nlohmann::json summary;
    bool pass;
};
QviOutcome run_qvi_check(const RunConfig& config);

/// Writes to a temporary file in the target directory and renames it into
/// place, so failures never leave a partial file.
void write_file_atomic(const std::string& path, const std::string& contents);

/// Full command-line entry point; returns the process exit code:
/// 0 success, 2 config/validation, 3 solver failure, 4 verified-condition violation.
int run_cli(int argc, const char* const* argv);

} // namespace priceband::cli

#endif
