#include "priceband/analysis.hpp"

#include <cmath>
#include <string>

namespace priceband {

AsymptoticConstants asymptotic_constants(const ModelParams& params) {
    const PayoffCoefficients k = derive_coefficients(params);
    AsymptoticConstants a{};
    a.band_prefactor = std::pow(6.0 * params.sigma * params.sigma / k.alpha, 0.25);
    a.band_prefactor_generic = std::pow(6.0 * params.sigma * params.sigma, 0.25);
    a.half_width_prefactor = std::pow(12.0 / (k.quad_coeff * k.exp_rate * k.exp_rate), 0.25);
    a.static_value = k.y_vertex / params.rho;
    a.sensitivity_prefactor = 2.0 / (k.exp_rate * k.exp_rate * a.band_prefactor * a.band_prefactor);
    a.sensitivity_prefactor_displayed = params.sigma / (std::sqrt(6.0) * params.rho);
    return a;
}

double exp_coeff_cost_sensitivity(const BaseSolution& sol) {
    const double sh = std::sinh(0.5 * sol.coeffs.exp_rate * sol.half_width);
    return -1.0 / (4.0 * sh * sh);
}

double value_cost_sensitivity(const BaseSolution& sol, double x) {
    const double slope = exp_coeff_cost_sensitivity(sol);
    if (x > sol.x_low && x < sol.x_high)
        return slope * 2.0 * std::cosh(sol.coeffs.exp_rate * (x - sol.x_star));
    return 2.0 * slope - 1.0;
}

CostSweep sweep_costs(const ModelParams& params, std::span<const double> costs,
                      std::span<const double> x_grid, std::span<const double> probes) {
    if (costs.empty()) throw GridError("sweep_costs: empty cost grid");
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (!(costs[i] > 0.0))
            throw GridError("sweep_costs: cost " + std::to_string(costs[i]) + " is not positive");
        if (i > 0 && !(costs[i] > costs[i - 1]))
            throw GridError("sweep_costs: cost grid must be strictly ascending");
    }

    CostSweep sweep;
    const double d = params.delta_cap;
    if (x_grid.empty()) {
        sweep.x_grid.reserve(201);
        for (int i = 0; i <= 200; ++i) sweep.x_grid.push_back(d * i / 200.0);
    } else {
        sweep.x_grid.assign(x_grid.begin(), x_grid.end());
    }
    if (probes.empty()) {
        const double x_vertex = derive_coefficients(params).x_vertex;
        sweep.probes = {0.1 * d, 0.3 * d, x_vertex, 0.7 * d, 0.9 * d};
    } else {
        sweep.probes.assign(probes.begin(), probes.end());
    }

    sweep.entries.reserve(costs.size());
    for (double cost : costs) {
        ModelParams p = params;
        p.c = cost;
        SweepEntry entry;
        entry.cost = cost;
        entry.solution = solve_base(p);
        const BaseValueFunction vf(entry.solution);
        entry.values.reserve(sweep.x_grid.size());
        for (double x : sweep.x_grid) entry.values.push_back(vf(x));
        entry.sensitivities.reserve(sweep.probes.size());
        for (double x : sweep.probes)
            entry.sensitivities.push_back(value_cost_sensitivity(entry.solution, x));
        sweep.entries.push_back(std::move(entry));
    }

    sweep.x_high_increasing = true;
    sweep.x_low_decreasing = true;
    for (std::size_t i = 1; i < sweep.entries.size(); ++i) {
        if (!(sweep.entries[i].solution.x_high > sweep.entries[i - 1].solution.x_high))
            sweep.x_high_increasing = false;
        if (!(sweep.entries[i].solution.x_low < sweep.entries[i - 1].solution.x_low))
            sweep.x_low_decreasing = false;
    }
    return sweep;
}

AsymptoticsReport verify_asymptotics(const ModelParams& params, std::span<const double> costs) {
    if (costs.empty()) throw GridError("verify_asymptotics: empty cost sequence");
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (!(costs[i] > 0.0))
            throw GridError("verify_asymptotics: costs must be positive");
        if (i > 0 && !(costs[i] < costs[i - 1]))
            throw GridError("verify_asymptotics: cost sequence must be strictly decreasing");
    }

    AsymptoticsReport report;
    report.constants = asymptotic_constants(params);
    report.entries.reserve(costs.size());
    for (double cost : costs) {
        ModelParams p = params;
        p.c = cost;
        const BaseSolution sol = solve_base(p);
        AsymptoticsEntry e{};
        e.cost = cost;
        const double root4 = std::pow(cost, 0.25);
        e.half_width_ratio = sol.half_width / (report.constants.half_width_prefactor * root4);
        e.band_gap_ratio =
            (sol.x_high - sol.coeffs.x_vertex) / (report.constants.band_prefactor * root4);
        e.value_gap = 2.0 * sol.exp_coeff + sol.coeffs.const_coeff - report.constants.static_value;
        report.entries.push_back(e);
    }

    report.ratio_tail_monotone = true;
    const std::size_t n = report.entries.size();
    const std::size_t tail = n >= 4 ? n - 4 : 0;
    for (std::size_t i = tail + 1; i < n; ++i) {
        const double prev = std::abs(report.entries[i - 1].half_width_ratio - 1.0);
        const double cur = std::abs(report.entries[i].half_width_ratio - 1.0);
        if (!(cur < prev)) report.ratio_tail_monotone = false;
    }
    return report;
}

std::vector<double> geometric_cost_sequence(double c0, double factor, double min_cost) {
    if (!(c0 > 0.0) || !(factor > 0.0) || !(factor < 1.0) || !(min_cost > 0.0))
        throw GridError("geometric_cost_sequence: need c0 > 0, factor in (0,1), min_cost > 0");
    std::vector<double> costs;
    for (double c = c0; c >= min_cost; c *= factor) costs.push_back(c);
    return costs;
}

} // namespace priceband
