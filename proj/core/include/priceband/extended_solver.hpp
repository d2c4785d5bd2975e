#ifndef PRICEBAND_EXTENDED_SOLVER_HPP
#define PRICEBAND_EXTENDED_SOLVER_HPP

#include "priceband/base_solver.hpp"
#include "priceband/model.hpp"
#include "priceband/policy.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace priceband {

/// Smooth piece of the extended value function,
///   phi(x) = coeff_grow e^{root_pos x} + coeff_decay e^{root_neg x}
///            - quad_coeff x^2 + lin_coeff x - const_shift,
/// with analytic derivatives. Solves (sigma^2/2) phi'' - mu phi' - rho phi + f = 0.
struct ExtendedPhi {
    double coeff_grow;  ///< coefficient of the growing exponential
    double coeff_decay; ///< coefficient of the decaying exponential
    PayoffCoefficients coeffs;

    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;
};

/// Outcome of the sufficient-condition checks performed after convergence.
struct ConditionReport {
    bool order_condition;     ///< 0 < x_low < x_star < x_high < delta
    bool curvature_at_star;   ///< phi''(x_star) < 0
    bool sign_pattern;        ///< phi'' > 0 on the flanks, < 0 between the inflections
    double inflect_low;       ///< left sign change of phi'' in (x_low, x_high); NaN if absent
    double inflect_high;      ///< right sign change; NaN if absent
    bool star_between_inflections; ///< inflect_low < x_star < inflect_high
    double x_hat;             ///< x_vertex - rho lambda / (2 alpha delta)
    bool restart_in_band;     ///< x_low < x_hat < x_high

    bool all() const {
        return order_condition && curvature_at_star && sign_pattern &&
               star_between_inflections && restart_in_band;
    }
};

/// Converged solution of the five-equation smooth-fit system for the model
/// with drift mu and state-dependent intervention cost c + lambda share(x).
struct ExtendedSolution {
    double coeff_grow;
    double coeff_decay;
    double x_low;
    double x_star;
    double x_high;
    double residual_norm; ///< final max-norm residual of the five equations
    ConditionReport conditions;
    PayoffCoefficients coeffs;
    ModelParams params;

    ExtendedPhi phi() const { return {coeff_grow, coeff_decay, coeffs}; }
};

/// Newton failed from every start; carries the last iterate for diagnosis.
class NoConvergenceError : public Error {
public:
    NoConvergenceError(std::string message, std::array<double, 5> iterate,
                       std::array<double, 5> residual, double residual_norm);

    std::array<double, 5> iterate;  ///< coeff_grow, coeff_decay, x_low, x_star, x_high
    std::array<double, 5> residual;
    double residual_norm;
};

/// The system converged but the verified sufficient conditions failed; the
/// solution (with its condition report) is carried for diagnosis.
class ConditionViolationError : public Error {
public:
    ConditionViolationError(std::string message, ExtendedSolution solution);

    ExtendedSolution solution;
};

/// Solves the five-unknown system {phi'(x_star) = 0, phi'(x_low) = phi'(x_high)
/// = lambda/delta, C0-pasting at both boundaries} by damped Newton with the
/// analytic Jacobian, warm-started by continuation from the base solution in
/// (mu, lambda) unless an initial guess is supplied. After convergence the
/// order condition and curvature conditions are checked; a violation throws
/// ConditionViolationError carrying the solution.
ExtendedSolution solve_extended(const ModelParams& params,
                                const std::optional<ExtendedSolution>& initial_guess = std::nullopt);

PolicyThresholds optimal_policy(const ExtendedSolution& sol);

/// Value function on the open interval (0, delta): the smooth piece inside the
/// band, the affine continuation phi(x_star) - c + (lambda/delta)(x - delta)
/// outside. Evaluation outside (0, delta) throws DomainError.
class ExtendedValueFunction {
public:
    explicit ExtendedValueFunction(ExtendedSolution sol);

    double operator()(double x) const;
    double d1(double x) const; ///< phi' inside, lambda/delta outside
    double d2(double x) const; ///< phi'' inside, 0 outside

    /// MV(x) = phi(x_star) - c - lambda share(x); coincides with the outside
    /// branch of the value function on (0, delta).
    double intervention_value(double x) const;

    const ExtendedSolution& solution() const { return sol_; }

private:
    ExtendedSolution sol_;
    double peak_value_;
};

/// QVI residuals with the drift operator (sigma^2/2) V'' - mu V' - rho V + R
/// and the state-dependent intervention operator. Grid must lie in (0, delta)
/// and avoid the pasting boundaries.
QviReport extended_qvi_residual(const ExtendedSolution& sol, std::span<const double> grid);

/// 2001 points spanning (0, delta) minus boundary-adjacent points.
std::vector<double> default_extended_qvi_grid(const ExtendedSolution& sol);

namespace detail {

using Vec5 = std::array<double, 5>;
using Mat5 = std::array<std::array<double, 5>, 5>;

/// The five smooth-fit equations at u = (coeff_grow, coeff_decay, x_low,
/// x_star, x_high); edge_slope = lambda / delta.
Vec5 smooth_fit_residual(const Vec5& u, const PayoffCoefficients& coeffs, double c,
                         double edge_slope, double delta);

/// Analytic Jacobian of smooth_fit_residual in the same variable order.
Mat5 smooth_fit_jacobian(const Vec5& u, const PayoffCoefficients& coeffs, double edge_slope);

/// Runs the damped Newton iteration from `start` at the full (mu, lambda) and
/// returns the accepted residual max-norms, starting with the norm at `start`.
std::vector<double> newton_residual_trace(const ModelParams& params, const Vec5& start);

} // namespace detail

} // namespace priceband

#endif
