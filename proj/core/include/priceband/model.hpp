#ifndef PRICEBAND_MODEL_HPP
#define PRICEBAND_MODEL_HPP

#include "priceband/errors.hpp"

namespace priceband {

/// Problem constants for the retail price-spread model.
///
/// The controlled state is the spread x between the retail and the wholesale
/// price. Customers react through a truncated-linear market share that is 1
/// at x <= 0 and 0 at x >= delta_cap; running payoff is income minus
/// quadratic operating costs. Each price adjustment costs
/// c + lambda * share(x). The base model has mu = lambda = 0.
struct ModelParams {
    double rho;       ///< discount rate per unit time, > 0
    double sigma;     ///< spread volatility per sqrt(time), > 0
    double b;         ///< operating-cost scale, >= 0
    double delta_cap; ///< spread at which the market share hits zero, > 0
    double c;         ///< fixed intervention cost, > 0
    double mu = 0.0;     ///< wholesale drift per unit time, >= 0 (spread drifts at -mu)
    double lambda = 0.0; ///< share-proportional intervention cost scale, >= 0
};

/// Throws InvalidParameterError naming the violated bound.
void validate(const ModelParams& params);

/// Constants derived from ModelParams.
///
/// On [0, delta_cap] the running payoff is the concave parabola
///   f(x) = -alpha (x - x_vertex)^2 + y_vertex.
/// The continuation-region ODE (sigma^2/2) u'' - mu u' - rho u + f = 0 has
/// characteristic roots root_pos > 0 > root_neg and the particular solution
///   -quad_coeff x^2 + lin_coeff x - const_shift   (const_shift enters negated).
/// For mu = 0 the roots collapse to +/- exp_rate and the value function is
/// written symmetrically about x_vertex with constant term const_coeff.
struct PayoffCoefficients {
    double alpha;           ///< parabola concavity, (delta+b)/delta^2
    double x_vertex;        ///< payoff-maximizing spread
    double y_vertex;        ///< maximal payoff rate
    double x_zero;          ///< smaller zero of the payoff within [0, delta]
    double share_at_vertex; ///< market share at x_vertex, in (0, 1/2]
    double exp_rate;        ///< sqrt(2 rho / sigma^2)
    double quad_coeff;      ///< alpha / rho
    double const_coeff;     ///< y_vertex/rho - 2 quad_coeff / exp_rate^2
    double exp_coeff_max;   ///< quad_coeff / exp_rate^2, supremum of admissible exp. coefficients
    double root_pos;        ///< (mu + sqrt(mu^2 + 2 rho sigma^2)) / sigma^2
    double root_neg;        ///< (mu - sqrt(mu^2 + 2 rho sigma^2)) / sigma^2
    double lin_coeff;       ///< 2 alpha x_vertex / rho + 2 alpha mu / rho^2
    double const_shift;     ///< (alpha x_v^2 - y_v)/rho + alpha(sigma^2 + 2 mu x_v)/rho^2 + 2 alpha mu^2/rho^3
};

/// Evaluates every closed-form coefficient above. Deterministic; validates params.
PayoffCoefficients derive_coefficients(const ModelParams& params);

/// Validated parameters plus eagerly derived coefficients.
///
/// Immutable after construction; safe to share across threads.
class Model {
public:
    explicit Model(const ModelParams& params);

    const ModelParams& params() const { return params_; }
    const PayoffCoefficients& coeffs() const { return coeffs_; }

    /// Market share at spread x: 1 for x <= 0, 1 - x/delta on (0, delta), 0 for x >= delta.
    double market_share(double x) const;

    /// Running payoff rate R(x) = x*share - b*share^2, evaluated branchwise:
    /// x - b for x < 0, the parabola on [0, delta], 0 beyond delta.
    double running_payoff(double x) const;

    /// Cost of one intervention from pre-jump spread x: c + lambda * market_share(x).
    double intervention_cost(double x) const;

private:
    ModelParams params_;
    PayoffCoefficients coeffs_;
};

} // namespace priceband

#endif
