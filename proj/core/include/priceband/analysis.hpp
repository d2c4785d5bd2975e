#ifndef PRICEBAND_ANALYSIS_HPP
#define PRICEBAND_ANALYSIS_HPP

#include "priceband/base_solver.hpp"
#include "priceband/model.hpp"

#include <span>
#include <vector>

namespace priceband {

/// Closed-form constants governing the small-cost regime.
struct AsymptoticConstants {
    /// C in x_low/x_high ~ x_vertex -/+ C c^{1/4}: (6 sigma^2 / alpha)^{1/4}.
    double band_prefactor;
    /// Same constant for a unit-curvature payoff: (6 sigma^2)^{1/4}.
    double band_prefactor_generic;
    /// (12 / (quad_coeff exp_rate^2))^{1/4}; equals band_prefactor identically.
    double half_width_prefactor;
    /// Value of holding the spread at the vertex forever: y_vertex / rho.
    double static_value;
    /// Prefactor in dV/dc ~ -sensitivity_prefactor / sqrt(c), from the
    /// sensitivity chain 2/(exp_rate^2 band_prefactor^2) = sigma sqrt(alpha) / (sqrt(6) rho).
    double sensitivity_prefactor;
    /// The alpha-free constant sigma / (sqrt(6) rho) that the robustness
    /// statement displays; it matches sensitivity_prefactor only for alpha = 1.
    /// Reported for comparison, never asserted.
    double sensitivity_prefactor_displayed;
};

AsymptoticConstants asymptotic_constants(const ModelParams& params);

/// dV^c/dc at x: the exponential-pair sensitivity inside the open band,
/// 2 a'(c) - 1 outside, where a'(c) = -1/(4 sinh^2(exp_rate half_width / 2)).
/// Negative everywhere; continuous across the band boundary.
double value_cost_sensitivity(const BaseSolution& sol, double x);

/// a'(c) itself (the cost-derivative of the exponential coefficient).
double exp_coeff_cost_sensitivity(const BaseSolution& sol);

struct SweepEntry {
    double cost;
    BaseSolution solution;
    std::vector<double> values;        ///< V^c on the shared x grid
    std::vector<double> sensitivities; ///< dV^c/dc at the probe points
};

/// Per-cost solutions over an ascending cost grid, with the value curves and
/// sensitivities sampled on shared grids.
struct CostSweep {
    std::vector<double> x_grid;
    std::vector<double> probes;
    std::vector<SweepEntry> entries;
    bool x_high_increasing; ///< strict, across consecutive entries
    bool x_low_decreasing;  ///< strict
};

/// Solves once per cost. Costs must be strictly ascending and positive
/// (GridError otherwise); a cost at or above c_bar propagates
/// CostTooLargeError naming the offending cost. Empty grids default the
/// x grid to 201 points on [0, delta] and the probes to five interior spreads.
CostSweep sweep_costs(const ModelParams& params, std::span<const double> costs,
                      std::span<const double> x_grid = {}, std::span<const double> probes = {});

struct AsymptoticsEntry {
    double cost;
    double half_width_ratio; ///< half_width(c) / (half_width_prefactor c^{1/4})
    double band_gap_ratio;   ///< (x_high(c) - x_vertex) / (band_prefactor c^{1/4})
    double value_gap;        ///< V^c(x_vertex) - static_value, < 0
};

struct AsymptoticsReport {
    AsymptoticConstants constants;
    std::vector<AsymptoticsEntry> entries;
    /// |half_width_ratio - 1| strictly decreasing over the last four entries.
    bool ratio_tail_monotone;
};

/// Tracks the fourth-root law down a decreasing cost sequence. Costs must be
/// strictly decreasing, positive and below c_bar.
AsymptoticsReport verify_asymptotics(const ModelParams& params, std::span<const double> costs);

/// Geometric sequence c0, c0*factor, ... floored at min_cost; c0 must be the
/// largest. Convenience builder for verify_asymptotics.
std::vector<double> geometric_cost_sequence(double c0, double factor = 0.1,
                                            double min_cost = 1e-10);

} // namespace priceband

#endif
