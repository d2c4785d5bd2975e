#include "priceband/base_solver.hpp"

#include "priceband/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace priceband {

double cost_for_half_width(double y, const PayoffCoefficients& k) {
    if (!(y > 0.0)) throw DomainError("cost_for_half_width: half-width must be > 0");
    const double r = k.exp_rate;
    return k.quad_coeff * y * (y - (2.0 / r) * std::tanh(0.5 * r * y));
}

double cost_for_half_width_derivative(double y, const PayoffCoefficients& k) {
    if (!(y > 0.0)) throw DomainError("cost_for_half_width_derivative: half-width must be > 0");
    const double r = k.exp_rate;
    const double sh = std::sinh(r * y);
    const double shh = std::sinh(0.5 * r * y);
    return (2.0 * k.quad_coeff / r) * (shh * shh) / (sh * sh) * 2.0 *
           (r * y * std::cosh(r * y) - sh);
}

double half_width_for_exp_coeff(double a, const PayoffCoefficients& k) {
    if (!(a > 0.0) || !(a < k.exp_coeff_max))
        throw DomainError("half_width_for_exp_coeff: coefficient must lie in (0, " +
                          std::to_string(k.exp_coeff_max) + ")");
    const double r = k.exp_rate;
    const auto pasting = [&](double y) {
        return a * r * std::exp(r * y) - a * r * std::exp(-r * y) - 2.0 * k.quad_coeff * y;
    };
    // pasting() vanishes at 0, dips negative, and grows to +inf; its minimum
    // sits where cosh(r y) = exp_coeff_max / a, so the root lies to the right.
    const double y_min = std::acosh(k.exp_coeff_max / a) / r;
    if (pasting(y_min) >= 0.0) return y_min; // only at a ~ exp_coeff_max, where the root degenerates
    const auto [lo, hi] = expand_bracket_up(pasting, y_min, 2.0 * y_min);
    return bisect(pasting, lo, hi, 1e-13).x;
}

double cost_for_exp_coeff(double a, const PayoffCoefficients& k) {
    const double y = half_width_for_exp_coeff(a, k);
    const double sh = std::sinh(0.5 * k.exp_rate * y);
    // e^{ry} + e^{-ry} - 2 written as 4 sinh^2(ry/2); the inner root enters
    // only through a stationary direction, so its 1e-13 tolerance is ample.
    return k.quad_coeff * y * y - 4.0 * a * sh * sh;
}

BaseSolution solve_base(const ModelParams& params) {
    validate(params);
    if (params.mu != 0.0)
        throw InvalidParameterError("base-model solver requires mu = 0 (got mu = " +
                                    std::to_string(params.mu) + ")");
    if (params.lambda != 0.0)
        throw InvalidParameterError("base-model solver requires lambda = 0 (got lambda = " +
                                    std::to_string(params.lambda) + ")");

    BaseSolution sol{};
    sol.params = params;
    sol.coeffs = derive_coefficients(params);
    const PayoffCoefficients& k = sol.coeffs;

    const double width_max = params.delta_cap - k.x_vertex;
    sol.c_bar = cost_for_half_width(width_max, k);
    if (!(params.c < sol.c_bar)) throw CostTooLargeError(params.c, sol.c_bar);

    const auto excess = [&](double y) { return cost_for_half_width(y, k) - params.c; };
    sol.half_width = bisect(excess, width_max * 1e-15, width_max, 1e-13).x;
    // polish to the rounding floor; the bracketed bisection guarantees the
    // start is within ~1e-13 of the root, so two guarded Newton steps suffice
    for (int i = 0; i < 2; ++i) {
        const double slope = cost_for_half_width_derivative(sol.half_width, k);
        if (!(slope > 0.0)) break;
        const double trial = sol.half_width - excess(sol.half_width) / slope;
        if (!(trial > 0.0 && trial < width_max)) break;
        sol.half_width = trial;
    }
    sol.exp_coeff =
        k.quad_coeff * sol.half_width / (k.exp_rate * std::sinh(k.exp_rate * sol.half_width));
    sol.x_star = k.x_vertex;
    sol.x_low = k.x_vertex - sol.half_width;
    sol.x_high = k.x_vertex + sol.half_width;
    return sol;
}

PolicyThresholds optimal_policy(const BaseSolution& sol) {
    return {sol.x_low, sol.x_star, sol.x_high};
}

BaseValueFunction::BaseValueFunction(BaseSolution sol)
    : sol_(sol), peak_value_(2.0 * sol.exp_coeff + sol.coeffs.const_coeff) {}

double BaseValueFunction::phi(double x) const {
    const double dx = x - sol_.x_star;
    return 2.0 * sol_.exp_coeff * std::cosh(sol_.coeffs.exp_rate * dx) -
           sol_.coeffs.quad_coeff * dx * dx + sol_.coeffs.const_coeff;
}

double BaseValueFunction::phi_d1(double x) const {
    const double dx = x - sol_.x_star;
    return 2.0 * sol_.exp_coeff * sol_.coeffs.exp_rate * std::sinh(sol_.coeffs.exp_rate * dx) -
           2.0 * sol_.coeffs.quad_coeff * dx;
}

double BaseValueFunction::phi_d2(double x) const {
    const double dx = x - sol_.x_star;
    const double r = sol_.coeffs.exp_rate;
    return 2.0 * sol_.exp_coeff * r * r * std::cosh(r * dx) - 2.0 * sol_.coeffs.quad_coeff;
}

double BaseValueFunction::operator()(double x) const {
    if (x > sol_.x_low && x < sol_.x_high) return phi(x);
    return peak_value_ - sol_.params.c;
}

double BaseValueFunction::intervention_value() const { return peak_value_ - sol_.params.c; }

namespace {

void require_off_boundary(double x, const BaseSolution& sol) {
    if (std::abs(x - sol.x_low) < 1e-12 || std::abs(x - sol.x_high) < 1e-12)
        throw GridError("qvi grid contains a pasting boundary (x = " + std::to_string(x) +
                        "); V'' is discontinuous there");
}

} // namespace

QviReport qvi_residual(const BaseValueFunction& vf, std::span<const double> grid) {
    const BaseSolution& sol = vf.solution();
    const Model model(sol.params);
    const double half_var = 0.5 * sol.params.sigma * sol.params.sigma;
    const double mv = vf.intervention_value();

    QviReport report;
    report.points.reserve(grid.size());
    report.max_term = -std::numeric_limits<double>::infinity();
    report.min_active_term = std::numeric_limits<double>::infinity();
    for (double x : grid) {
        require_off_boundary(x, sol);
        QviPoint pt{};
        pt.x = x;
        pt.in_continuation = x > sol.x_low && x < sol.x_high;
        const double value = vf(x);
        const double d2 = pt.in_continuation ? vf.phi_d2(x) : 0.0;
        pt.ode_term = half_var * d2 - sol.params.rho * value + model.running_payoff(x);
        pt.intervention_term = mv - value;
        report.max_term = std::max(report.max_term, std::max(pt.ode_term, pt.intervention_term));
        report.min_active_term = std::min(report.min_active_term,
                                          pt.in_continuation ? pt.ode_term : pt.intervention_term);
        report.points.push_back(pt);
    }
    return report;
}

std::vector<double> default_qvi_grid(const BaseSolution& sol) {
    const double d = sol.params.delta_cap;
    std::vector<double> grid;
    grid.reserve(2001);
    for (int i = 0; i <= 2000; ++i) {
        const double x = -d + 3.0 * d * i / 2000.0;
        if (std::abs(x - sol.x_low) < 1e-6 || std::abs(x - sol.x_high) < 1e-6) continue;
        grid.push_back(x);
    }
    return grid;
}

} // namespace priceband
