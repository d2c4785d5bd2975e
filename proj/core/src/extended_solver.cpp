#include "priceband/extended_solver.hpp"

#include "priceband/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace priceband {

double ExtendedPhi::value(double x) const {
    return coeff_grow * std::exp(coeffs.root_pos * x) + coeff_decay * std::exp(coeffs.root_neg * x) -
           coeffs.quad_coeff * x * x + coeffs.lin_coeff * x - coeffs.const_shift;
}

double ExtendedPhi::d1(double x) const {
    return coeff_grow * coeffs.root_pos * std::exp(coeffs.root_pos * x) +
           coeff_decay * coeffs.root_neg * std::exp(coeffs.root_neg * x) -
           2.0 * coeffs.quad_coeff * x + coeffs.lin_coeff;
}

double ExtendedPhi::d2(double x) const {
    return coeff_grow * coeffs.root_pos * coeffs.root_pos * std::exp(coeffs.root_pos * x) +
           coeff_decay * coeffs.root_neg * coeffs.root_neg * std::exp(coeffs.root_neg * x) -
           2.0 * coeffs.quad_coeff;
}

NoConvergenceError::NoConvergenceError(std::string message, std::array<double, 5> iterate,
                                       std::array<double, 5> residual, double residual_norm)
    : Error(std::move(message)), iterate(iterate), residual(residual), residual_norm(residual_norm) {}

ConditionViolationError::ConditionViolationError(std::string message, ExtendedSolution solution)
    : Error(std::move(message)), solution(std::move(solution)) {}

namespace detail {

Vec5 smooth_fit_residual(const Vec5& u, const PayoffCoefficients& k, double c, double edge_slope,
                         double delta) {
    const ExtendedPhi phi{u[0], u[1], k};
    const double continuation_low = phi.value(u[3]) - c + edge_slope * (u[2] - delta);
    const double continuation_high = phi.value(u[3]) - c + edge_slope * (u[4] - delta);
    return {phi.d1(u[3]),
            phi.d1(u[2]) - edge_slope,
            phi.d1(u[4]) - edge_slope,
            phi.value(u[2]) - continuation_low,
            phi.value(u[4]) - continuation_high};
}

Mat5 smooth_fit_jacobian(const Vec5& u, const PayoffCoefficients& k, double edge_slope) {
    const ExtendedPhi phi{u[0], u[1], k};
    const double m1 = k.root_pos, m2 = k.root_neg;
    const double e1l = std::exp(m1 * u[2]), e1s = std::exp(m1 * u[3]), e1h = std::exp(m1 * u[4]);
    const double e2l = std::exp(m2 * u[2]), e2s = std::exp(m2 * u[3]), e2h = std::exp(m2 * u[4]);
    Mat5 jac{};
    jac[0] = {m1 * e1s, m2 * e2s, 0.0, phi.d2(u[3]), 0.0};
    jac[1] = {m1 * e1l, m2 * e2l, phi.d2(u[2]), 0.0, 0.0};
    jac[2] = {m1 * e1h, m2 * e2h, 0.0, 0.0, phi.d2(u[4])};
    jac[3] = {e1l - e1s, e2l - e2s, phi.d1(u[2]) - edge_slope, -phi.d1(u[3]), 0.0};
    jac[4] = {e1h - e1s, e2h - e2s, 0.0, -phi.d1(u[3]), phi.d1(u[4]) - edge_slope};
    return jac;
}

} // namespace detail

namespace {

using detail::Vec5;
using detail::Mat5;

// iterate toward the rounding floor, accept anything at or below the contract
constexpr double kResidualTarget = 1e-12;
constexpr double kResidualAccept = 1e-10;
constexpr double kStepTol = 1e-14;
constexpr int kMaxNewtonIterations = 100;
constexpr int kMaxHalvings = 30;

double max_abs(const Vec5& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Column-equilibrated Gaussian elimination with partial pivoting. The columns
// of the smooth-fit Jacobian span many orders of magnitude (the growing
// exponential dwarfs the threshold columns), so equilibration is required for
// a usable solve. Returns false on a numerically singular matrix.
bool solve_linear(Mat5 a, Vec5 rhs, Vec5& out) {
    Vec5 col_scale{};
    for (int j = 0; j < 5; ++j) {
        double m = 0.0;
        for (int i = 0; i < 5; ++i) m = std::max(m, std::abs(a[i][j]));
        if (m == 0.0 || !std::isfinite(m)) return false;
        col_scale[j] = m;
        for (int i = 0; i < 5; ++i) a[i][j] /= m;
    }
    std::array<int, 5> perm{0, 1, 2, 3, 4};
    for (int col = 0; col < 5; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 5; ++row)
            if (std::abs(a[perm[row]][col]) > std::abs(a[perm[pivot]][col])) pivot = row;
        std::swap(perm[col], perm[pivot]);
        const double diag = a[perm[col]][col];
        if (diag == 0.0 || !std::isfinite(diag)) return false;
        for (int row = col + 1; row < 5; ++row) {
            const double factor = a[perm[row]][col] / diag;
            a[perm[row]][col] = 0.0;
            for (int j = col + 1; j < 5; ++j) a[perm[row]][j] -= factor * a[perm[col]][j];
            rhs[perm[row]] -= factor * rhs[perm[col]];
        }
    }
    Vec5 solution{};
    for (int col = 4; col >= 0; --col) {
        double acc = rhs[perm[col]];
        for (int j = col + 1; j < 5; ++j) acc -= a[perm[col]][j] * solution[j];
        solution[col] = acc / a[perm[col]][col];
    }
    for (int j = 0; j < 5; ++j) out[j] = solution[j] / col_scale[j];
    return true;
}

struct NewtonOutcome {
    Vec5 iterate;
    Vec5 residual;
    double residual_norm;
    bool converged;
};

NewtonOutcome damped_newton(Vec5 u, const PayoffCoefficients& k, double c, double edge_slope,
                            double delta, std::vector<double>* trace = nullptr) {
    Vec5 r = detail::smooth_fit_residual(u, k, c, edge_slope, delta);
    double rn = max_abs(r);
    if (trace) trace->push_back(rn);
    for (int it = 0; it < kMaxNewtonIterations; ++it) {
        if (rn <= kResidualTarget) return {u, r, rn, true};
        Vec5 direction{};
        Vec5 neg_r = r;
        for (double& x : neg_r) x = -x;
        if (!solve_linear(detail::smooth_fit_jacobian(u, k, edge_slope), neg_r, direction))
            return {u, r, rn, false};

        double step = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= kMaxHalvings; ++halving) {
            Vec5 trial{};
            for (int j = 0; j < 5; ++j) trial[j] = u[j] + step * direction[j];
            const Vec5 trial_r = detail::smooth_fit_residual(trial, k, c, edge_slope, delta);
            const double trial_norm = max_abs(trial_r);
            if (std::isfinite(trial_norm) && trial_norm < rn) {
                u = trial;
                r = trial_r;
                rn = trial_norm;
                if (trace) trace->push_back(rn);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) return {u, r, rn, rn <= kResidualAccept};
        if (step * max_abs(direction) <= kStepTol) return {u, r, rn, rn <= kResidualAccept};
    }
    return {u, r, rn, rn <= kResidualAccept};
}

ModelParams scaled_params(const ModelParams& params, double t) {
    ModelParams p = params;
    p.mu = params.mu * t;
    p.lambda = params.lambda * t;
    return p;
}

Vec5 base_start(const ModelParams& params) {
    ModelParams base = params;
    base.mu = 0.0;
    base.lambda = 0.0;
    const BaseSolution sol = solve_base(base);
    const double r = sol.coeffs.exp_rate;
    return {sol.exp_coeff * std::exp(-r * sol.x_star), sol.exp_coeff * std::exp(r * sol.x_star),
            sol.x_low, sol.x_star, sol.x_high};
}

// Re-anchors the exponential coefficients when the characteristic roots move
// between continuation stages: preserves coeff_grow e^{m1 x_high} and
// coeff_decay e^{m2 x_low}, which are the O(1) boundary contributions.
void rescale_start(Vec5& u, const PayoffCoefficients& from, const PayoffCoefficients& to) {
    u[0] *= std::exp((from.root_pos - to.root_pos) * u[4]);
    u[1] *= std::exp((from.root_neg - to.root_neg) * u[2]);
}

ConditionReport check_conditions(const Vec5& u, const PayoffCoefficients& k,
                                 const ModelParams& params) {
    const ExtendedPhi phi{u[0], u[1], k};
    ConditionReport rep{};
    rep.order_condition = 0.0 < u[2] && u[2] < u[3] && u[3] < u[4] && u[4] < params.delta_cap;
    rep.curvature_at_star = phi.d2(u[3]) < 0.0;
    rep.x_hat = k.x_vertex - params.rho * params.lambda / (2.0 * k.alpha * params.delta_cap);
    rep.restart_in_band = u[2] < rep.x_hat && rep.x_hat < u[4];
    rep.inflect_low = std::numeric_limits<double>::quiet_NaN();
    rep.inflect_high = std::numeric_limits<double>::quiet_NaN();

    // Scan phi'' on a fine grid over [x_low, x_high]; bracket each sign change
    // and refine it by bisection. The admissible pattern is +,-,+ with exactly
    // two changes.
    constexpr int kScanPoints = 4001;
    const double lo = u[2], hi = u[4];
    std::vector<double> flips;
    double prev_x = lo;
    double prev_d2 = phi.d2(prev_x);
    for (int i = 1; i < kScanPoints; ++i) {
        const double x = lo + (hi - lo) * i / (kScanPoints - 1);
        const double d2 = phi.d2(x);
        if ((d2 < 0.0) != (prev_d2 < 0.0)) {
            const auto curvature = [&phi](double s) { return phi.d2(s); };
            flips.push_back(bisect(curvature, prev_x, x, 1e-12).x);
        }
        prev_x = x;
        prev_d2 = d2;
    }
    if (flips.size() == 2 && phi.d2(lo) > 0.0 && phi.d2(hi) > 0.0 &&
        phi.d2(0.5 * (flips[0] + flips[1])) < 0.0) {
        rep.sign_pattern = true;
        rep.inflect_low = flips[0];
        rep.inflect_high = flips[1];
        rep.star_between_inflections = flips[0] < u[3] && u[3] < flips[1];
    } else {
        rep.sign_pattern = false;
        rep.star_between_inflections = false;
        if (flips.size() >= 1) rep.inflect_low = flips.front();
        if (flips.size() >= 2) rep.inflect_high = flips[1];
    }
    return rep;
}

ExtendedSolution build_solution(const Vec5& u, double residual_norm, const ModelParams& params,
                                const PayoffCoefficients& k) {
    ExtendedSolution sol{};
    sol.coeff_grow = u[0];
    sol.coeff_decay = u[1];
    sol.x_low = u[2];
    sol.x_star = u[3];
    sol.x_high = u[4];
    sol.residual_norm = residual_norm;
    sol.coeffs = k;
    sol.params = params;
    sol.conditions = check_conditions(u, k, params);
    return sol;
}

} // namespace

namespace detail {

std::vector<double> newton_residual_trace(const ModelParams& params, const Vec5& start) {
    validate(params);
    const PayoffCoefficients k = derive_coefficients(params);
    std::vector<double> trace;
    damped_newton(start, k, params.c, params.lambda / params.delta_cap, params.delta_cap, &trace);
    return trace;
}

} // namespace detail

ExtendedSolution solve_extended(const ModelParams& params,
                                const std::optional<ExtendedSolution>& initial_guess) {
    validate(params);
    const PayoffCoefficients target_coeffs = derive_coefficients(params);
    const double edge_slope = params.lambda / params.delta_cap;

    NewtonOutcome outcome{};
    bool solved = false;

    if (initial_guess) {
        const Vec5 start{initial_guess->coeff_grow, initial_guess->coeff_decay,
                         initial_guess->x_low, initial_guess->x_star, initial_guess->x_high};
        outcome = damped_newton(start, target_coeffs, params.c, edge_slope, params.delta_cap);
        solved = outcome.converged;
    }

    if (!solved) {
        // Continuation from the base model: scale (mu, lambda) by t, warm-start
        // each stage, bisect a stage that stalls (down to steps of 1/64).
        Vec5 u = base_start(params);
        PayoffCoefficients stage_coeffs = derive_coefficients(scaled_params(params, 0.0));
        double t = 0.0;
        double step = 0.25;
        constexpr double kMinStep = 1.0 / 64.0;
        while (t < 1.0) {
            const double t_next = std::min(1.0, t + step);
            const PayoffCoefficients next_coeffs =
                derive_coefficients(scaled_params(params, t_next));
            Vec5 trial = u;
            rescale_start(trial, stage_coeffs, next_coeffs);
            outcome = damped_newton(trial, next_coeffs, params.c, params.lambda * t_next / params.delta_cap,
                                    params.delta_cap);
            if (outcome.converged) {
                u = outcome.iterate;
                stage_coeffs = next_coeffs;
                t = t_next;
            } else {
                step *= 0.5;
                if (step < kMinStep)
                    throw NoConvergenceError(
                        "extended smooth-fit system: Newton stalled at continuation stage t = " +
                            std::to_string(t_next) + " (residual max-norm " +
                            std::to_string(outcome.residual_norm) + ")",
                        outcome.iterate, outcome.residual, outcome.residual_norm);
            }
        }
        solved = true;
    }

    ExtendedSolution sol =
        build_solution(outcome.iterate, outcome.residual_norm, params, target_coeffs);
    if (!sol.conditions.all()) {
        std::string why = "extended solution violates verified conditions:";
        if (!sol.conditions.order_condition) why += " order";
        if (!sol.conditions.curvature_at_star) why += " curvature-at-star";
        if (!sol.conditions.sign_pattern) why += " curvature-sign-pattern";
        if (!sol.conditions.star_between_inflections) why += " star-between-inflections";
        if (!sol.conditions.restart_in_band) why += " restart-state-location";
        throw ConditionViolationError(std::move(why), std::move(sol));
    }
    return sol;
}

PolicyThresholds optimal_policy(const ExtendedSolution& sol) {
    return {sol.x_low, sol.x_star, sol.x_high};
}

ExtendedValueFunction::ExtendedValueFunction(ExtendedSolution sol)
    : sol_(std::move(sol)), peak_value_(sol_.phi().value(sol_.x_star)) {}

double ExtendedValueFunction::operator()(double x) const {
    if (!(x > 0.0 && x < sol_.params.delta_cap))
        throw DomainError("extended value function is defined on (0, delta) only (x = " +
                          std::to_string(x) + ")");
    if (x > sol_.x_low && x < sol_.x_high) return sol_.phi().value(x);
    const double edge_slope = sol_.params.lambda / sol_.params.delta_cap;
    return peak_value_ - sol_.params.c + edge_slope * (x - sol_.params.delta_cap);
}

double ExtendedValueFunction::d1(double x) const {
    if (x > sol_.x_low && x < sol_.x_high) return sol_.phi().d1(x);
    return sol_.params.lambda / sol_.params.delta_cap;
}

double ExtendedValueFunction::d2(double x) const {
    if (x > sol_.x_low && x < sol_.x_high) return sol_.phi().d2(x);
    return 0.0;
}

double ExtendedValueFunction::intervention_value(double x) const {
    const Model model(sol_.params);
    return peak_value_ - model.intervention_cost(x);
}

QviReport extended_qvi_residual(const ExtendedSolution& sol, std::span<const double> grid) {
    const ExtendedValueFunction vf(sol);
    const Model model(sol.params);
    const double half_var = 0.5 * sol.params.sigma * sol.params.sigma;

    QviReport report;
    report.points.reserve(grid.size());
    report.max_term = -std::numeric_limits<double>::infinity();
    report.min_active_term = std::numeric_limits<double>::infinity();
    for (double x : grid) {
        if (!(x > 0.0 && x < sol.params.delta_cap))
            throw GridError("extended qvi grid must lie in (0, delta); got x = " +
                            std::to_string(x));
        if (std::abs(x - sol.x_low) < 1e-12 || std::abs(x - sol.x_high) < 1e-12)
            throw GridError("extended qvi grid contains a pasting boundary (x = " +
                            std::to_string(x) + ")");
        QviPoint pt{};
        pt.x = x;
        pt.in_continuation = x > sol.x_low && x < sol.x_high;
        const double value = vf(x);
        pt.ode_term = half_var * vf.d2(x) - sol.params.mu * vf.d1(x) - sol.params.rho * value +
                      model.running_payoff(x);
        pt.intervention_term = vf.intervention_value(x) - value;
        report.max_term = std::max(report.max_term, std::max(pt.ode_term, pt.intervention_term));
        report.min_active_term = std::min(report.min_active_term,
                                          pt.in_continuation ? pt.ode_term : pt.intervention_term);
        report.points.push_back(pt);
    }
    return report;
}

std::vector<double> default_extended_qvi_grid(const ExtendedSolution& sol) {
    const double d = sol.params.delta_cap;
    const double lo = d * 1e-6;
    const double hi = d * (1.0 - 1e-6);
    std::vector<double> grid;
    grid.reserve(2001);
    for (int i = 0; i <= 2000; ++i) {
        const double x = lo + (hi - lo) * i / 2000.0;
        if (std::abs(x - sol.x_low) < 1e-6 || std::abs(x - sol.x_high) < 1e-6) continue;
        grid.push_back(x);
    }
    return grid;
}

} // namespace priceband
