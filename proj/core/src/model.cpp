#include "priceband/model.hpp"

#include <cmath>
#include <string>

namespace priceband {

namespace {

[[noreturn]] void fail(const std::string& name, double value, const char* bound) {
    throw InvalidParameterError("parameter " + name + " = " + std::to_string(value) +
                                " violates " + name + " " + bound);
}

} // namespace

void validate(const ModelParams& p) {
    if (!(p.rho > 0.0)) fail("rho", p.rho, "> 0");
    if (!(p.sigma > 0.0)) fail("sigma", p.sigma, "> 0");
    if (!(p.b >= 0.0)) fail("b", p.b, ">= 0");
    if (!(p.delta_cap > 0.0)) fail("delta_cap", p.delta_cap, "> 0");
    if (!(p.c > 0.0)) fail("c", p.c, "> 0");
    if (!(p.mu >= 0.0)) fail("mu", p.mu, ">= 0");
    if (!(p.lambda >= 0.0)) fail("lambda", p.lambda, ">= 0");
}

PayoffCoefficients derive_coefficients(const ModelParams& p) {
    validate(p);
    PayoffCoefficients k{};
    const double d = p.delta_cap;
    k.alpha = (d + p.b) / (d * d);
    k.x_vertex = d * (d + 2.0 * p.b) / (2.0 * (d + p.b));
    k.y_vertex = d * d / (4.0 * (d + p.b));
    k.x_zero = p.b * d / (d + p.b);
    k.share_at_vertex = d / (2.0 * (d + p.b));
    k.exp_rate = std::sqrt(2.0 * p.rho) / p.sigma;
    k.quad_coeff = k.alpha / p.rho;
    k.const_coeff = k.y_vertex / p.rho - 2.0 * k.quad_coeff / (k.exp_rate * k.exp_rate);
    k.exp_coeff_max = k.quad_coeff / (k.exp_rate * k.exp_rate);
    const double s = std::sqrt(p.mu * p.mu + 2.0 * p.rho * p.sigma * p.sigma);
    k.root_pos = (p.mu + s) / (p.sigma * p.sigma);
    k.root_neg = (p.mu - s) / (p.sigma * p.sigma);
    k.lin_coeff = 2.0 * k.alpha * k.x_vertex / p.rho + 2.0 * k.alpha * p.mu / (p.rho * p.rho);
    k.const_shift = (k.alpha * k.x_vertex * k.x_vertex - k.y_vertex) / p.rho +
                    k.alpha * (p.sigma * p.sigma + 2.0 * p.mu * k.x_vertex) / (p.rho * p.rho) +
                    2.0 * k.alpha * p.mu * p.mu / (p.rho * p.rho * p.rho);
    return k;
}

Model::Model(const ModelParams& params) : params_(params), coeffs_(derive_coefficients(params)) {}

double Model::market_share(double x) const {
    if (x <= 0.0) return 1.0;
    if (x >= params_.delta_cap) return 0.0;
    return 1.0 - x / params_.delta_cap;
}

double Model::running_payoff(double x) const {
    if (x < 0.0) return x - params_.b;
    if (x > params_.delta_cap) return 0.0;
    const double dx = x - coeffs_.x_vertex;
    return -coeffs_.alpha * dx * dx + coeffs_.y_vertex;
}

double Model::intervention_cost(double x) const {
    return params_.c + params_.lambda * market_share(x);
}

} // namespace priceband
