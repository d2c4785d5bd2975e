#ifndef PRICEBAND_BASE_SOLVER_HPP
#define PRICEBAND_BASE_SOLVER_HPP

#include "priceband/model.hpp"
#include "priceband/policy.hpp"

#include <span>
#include <vector>

namespace priceband {

/// Solution of the symmetric smooth-fit system for the drift-free model.
///
/// The band is symmetric about the payoff vertex: x_low = x_vertex - half_width,
/// x_high = x_vertex + half_width, x_star = x_vertex, and the smooth piece of
/// the value function is
///   phi(x) = 2 exp_coeff cosh(exp_rate (x - x_vertex))
///            - quad_coeff (x - x_vertex)^2 + const_coeff.
struct BaseSolution {
    double exp_coeff;  ///< coefficient of the cosh term, in (0, coeffs.exp_coeff_max)
    double half_width; ///< band half-width, > 0
    double x_low;
    double x_star;
    double x_high;
    double c_bar; ///< largest admissible intervention cost for these parameters
    PayoffCoefficients coeffs;
    ModelParams params;
};

/// Intervention cost that yields band half-width y; strictly increasing with
/// cost_for_half_width(0+) = 0. The ratio (e^{ry}-1)^2/((e^{ry})^2-1) is
/// evaluated as tanh(ry/2), which is exact and avoids cancellation for small y.
/// Throws DomainError for y <= 0.
double cost_for_half_width(double y, const PayoffCoefficients& coeffs);

/// Derivative of cost_for_half_width; > 0 for y > 0.
double cost_for_half_width_derivative(double y, const PayoffCoefficients& coeffs);

/// Band half-width produced by exponential coefficient a: the unique positive
/// root of the derivative-pasting equation
///   a r e^{ry} - a r e^{-ry} - 2 quad_coeff y = 0,  r = exp_rate.
/// Defined for a in (0, exp_coeff_max); DomainError outside.
double half_width_for_exp_coeff(double a, const PayoffCoefficients& coeffs);

/// Intervention cost matched by exponential coefficient a, evaluated through
/// half_width_for_exp_coeff; strictly decreasing from +inf at 0+ to 0 at
/// exp_coeff_max-. DomainError for a outside (0, exp_coeff_max).
double cost_for_exp_coeff(double a, const PayoffCoefficients& coeffs);

/// Solves the symmetric smooth-fit system by bisecting cost_for_half_width on
/// (0, delta - x_vertex) and recovering the coefficient in closed form.
/// Requires mu = lambda = 0 and c < c_bar; throws InvalidParameterError or
/// CostTooLargeError (carrying c_bar) otherwise.
BaseSolution solve_base(const ModelParams& params);

/// Threshold triple consumed by the simulator: exit the open band, restart at x_star.
PolicyThresholds optimal_policy(const BaseSolution& sol);

/// Value function of the solved base model: the smooth piece inside the open
/// band, the constant phi(x_star) - c outside. Immutable; shareable.
class BaseValueFunction {
public:
    explicit BaseValueFunction(BaseSolution sol);

    /// V(x)
    double operator()(double x) const;

    /// Smooth piece and its derivatives, valid on all of R.
    double phi(double x) const;
    double phi_d1(double x) const;
    double phi_d2(double x) const;

    /// Value of intervening now and acting optimally afterwards: sup V - c.
    /// Constant in the pre-intervention state; equals min V.
    double intervention_value() const;

    const BaseSolution& solution() const { return sol_; }

private:
    BaseSolution sol_;
    double peak_value_;
};

struct QviPoint {
    double x;
    double ode_term;          ///< (sigma^2/2) V'' - mu V' - rho V + R
    double intervention_term; ///< MV - V
    bool in_continuation;
};

/// Pointwise quasi-variational-inequality residuals over a grid. The QVI
/// requires max{ode_term, intervention_term} = 0 with the active branch being
/// the ode term inside the band and the intervention term outside.
struct QviReport {
    std::vector<QviPoint> points;
    double max_term;        ///< largest of either term anywhere (<= tol required)
    double min_active_term; ///< smallest active-branch term (>= -tol required)

    bool within(double tol) const { return max_term <= tol && min_active_term >= -tol; }
};

/// Evaluates both QVI terms at each grid point using the analytic second
/// derivative inside the band and V'' = 0 outside. Grid points must stay away
/// from the pasting boundaries, where V'' jumps; throws GridError otherwise.
QviReport qvi_residual(const BaseValueFunction& vf, std::span<const double> grid);

/// 2001 uniform points on [-delta, 2 delta] minus points within 1e-6 of a boundary.
std::vector<double> default_qvi_grid(const BaseSolution& sol);

} // namespace priceband

#endif
