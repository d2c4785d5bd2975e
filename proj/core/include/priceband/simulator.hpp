#ifndef PRICEBAND_SIMULATOR_HPP
#define PRICEBAND_SIMULATOR_HPP

#include "priceband/model.hpp"
#include "priceband/policy.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace priceband {

/// Cost charged per intervention: the fixed c, or the state-dependent
/// c + lambda share(x) evaluated at the pre-jump state.
enum class CostModel { FixedCost, StateDependentCost };

struct SimulationConfig {
    long n_paths = 10000;
    double dt = 1e-3;
    double horizon = 300.0; ///< truncation time T
    std::uint64_t seed = 0;
    double initial_x = 0.0;
    PolicyThresholds policy{};
    CostModel cost_model = CostModel::FixedCost;
    /// 1 = serial; 0 = one worker per hardware thread. Results are identical
    /// either way: every path draws from its own (seed, index) stream and the
    /// reduction is a fixed-order pairwise sum.
    int threads = 1;
    /// Guard against dt too coarse or a degenerate band: a path exceeding this
    /// many interventions aborts the run.
    long max_interventions_per_path = 1000000;
};

/// Throws SimulationError naming the violated requirement.
void validate(const SimulationConfig& config);

struct PathStats {
    double payoff = 0.0;
    long interventions = 0;
    double first_exit_time = 0.0; ///< capped at horizon when the band is never left
    bool exited = false;
    double min_cost_charged = 0.0; ///< 0 when no intervention occurred
    double max_cost_charged = 0.0;
    double restart_deviation = 0.0; ///< max |X - x_star| right after a reset; 0 by construction
};

struct SimulationReport {
    double j_estimate; ///< pairwise-summed mean of per-path discounted payoffs
    double std_error;  ///< sample standard error of the mean
    double tail_bound; ///< y_vertex/rho * e^{-rho horizon}, from params (not sampled)
    double interventions_per_path;
    double mean_first_exit_time; ///< censored at horizon for paths that never exit
    long n_paths;
    std::uint64_t seed;
};

/// Euler path of the spread under the threshold policy: drift -mu dt, noise
/// sigma sqrt(dt) Z from the path's own stream; payoff integrated by the
/// left-point rule; band exits detected at step end, cost charged at the
/// detection time, state reset to x_star. The initial state is checked too:
/// starting outside the open band triggers an immediate intervention at t = 0.
PathStats simulate_path(const Model& model, const SimulationConfig& config,
                        std::uint64_t path_index);

/// All paths, in index order; parallelized across config.threads workers.
std::vector<PathStats> simulate_paths(const Model& model, const SimulationConfig& config);

/// Aggregate report; deterministic for a fixed (config, seed).
SimulationReport simulate(const Model& model, const SimulationConfig& config);

struct PolicyDifference {
    std::size_t first;
    std::size_t second;
    double mean_difference; ///< j(first) - j(second), paired across common paths
    double std_error;       ///< standard error of the paired difference
};

struct PolicyComparison {
    std::vector<SimulationReport> reports;   ///< one per input config, same order
    std::vector<std::size_t> ranking;        ///< config indices, best j_estimate first
    std::vector<PolicyDifference> differences; ///< all pairs i < j
};

/// Runs each config under common random numbers (identical per-path streams)
/// and reports paired payoff differences. Configs must share seed, n_paths,
/// dt and horizon; throws SimulationError (also for an empty list).
PolicyComparison compare_policies(const Model& model, std::span<const SimulationConfig> configs);

struct ExitTimeStats {
    double mean; ///< censored at horizon
    double q10;
    double median;
    double q90;
    double mean_discount; ///< sample mean of e^{-rho tau}; in (0, 1) for a proper band
    long censored;        ///< paths that never left the band within the horizon
    long n_paths;
};

/// Distribution of the first exit time from the open band (x_low, x_high)
/// started at initial_x, with no interventions. Starting on or outside the
/// band gives tau = 0.
ExitTimeStats first_exit_time_stats(const Model& model, const SimulationConfig& config);

/// Fixed-order pairwise sum; the reduction used for every report statistic.
double pairwise_sum(std::span<const double> values);

} // namespace priceband

#endif
