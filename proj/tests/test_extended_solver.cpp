#include "doctest.h"

#include "priceband/base_solver.hpp"
#include "priceband/extended_solver.hpp"
#include "reference_values.hpp"

#include <cmath>
#include <vector>

using namespace priceband;

TEST_CASE("the smooth piece solves its ODE identically") {
    for (const ModelParams& params : {refs::problem3(), refs::problem4()}) {
        const PayoffCoefficients k = derive_coefficients(params);
        const Model model(params);
        const ExtendedPhi phi{0.7, 31.0, k}; // arbitrary admissible coefficients
        for (int i = 1; i < 40; ++i) {
            const double x = 5.0 * i / 40.0;
            const double lhs = 0.5 * params.sigma * params.sigma * phi.d2(x) -
                               params.mu * phi.d1(x) - params.rho * phi.value(x) +
                               model.running_payoff(x);
            CHECK(std::abs(lhs) <= 1e-9 * std::max(1.0, std::abs(phi.value(x))));
        }
    }
}

TEST_CASE("zero exponential coefficients leave the particular polynomial") {
    const PayoffCoefficients k = derive_coefficients(refs::problem3());
    const ExtendedPhi phi{0.0, 0.0, k};
    for (double x : {0.3, 1.7, 4.2}) {
        const double poly = -k.quad_coeff * x * x + k.lin_coeff * x - k.const_shift;
        CHECK(phi.value(x) == doctest::Approx(poly).epsilon(1e-15));
        CHECK(phi.d1(x) == doctest::Approx(-2.0 * k.quad_coeff * x + k.lin_coeff).epsilon(1e-15));
        CHECK(phi.d2(x) == doctest::Approx(-2.0 * k.quad_coeff).epsilon(1e-15));
    }
}

TEST_CASE("for mu = 0 the two-coefficient form reproduces the symmetric one") {
    const BaseSolution base = solve_base(refs::problem1());
    const double r = base.coeffs.exp_rate;
    const ExtendedPhi phi{base.exp_coeff * std::exp(-r * base.x_star),
                          base.exp_coeff * std::exp(r * base.x_star), base.coeffs};
    const BaseValueFunction vf(base);
    for (int i = 0; i <= 50; ++i) {
        const double x = 5.0 * i / 50.0;
        CHECK(phi.value(x) == doctest::Approx(vf.phi(x)).epsilon(1e-12));
        CHECK(phi.d1(x) == doctest::Approx(vf.phi_d1(x)).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("analytic Jacobian of the smooth-fit system matches finite differences") {
    const ExtendedSolution sol = solve_extended(refs::problem4());
    const double edge_slope = sol.params.lambda / sol.params.delta_cap;
    const detail::Vec5 u{sol.coeff_grow, sol.coeff_decay, sol.x_low, sol.x_star, sol.x_high};
    const detail::Mat5 jac = detail::smooth_fit_jacobian(u, sol.coeffs, edge_slope);
    for (int j = 0; j < 5; ++j) {
        const double h = std::max(std::abs(u[j]), 1e-4) * 1e-6;
        detail::Vec5 up = u, down = u;
        up[j] += h;
        down[j] -= h;
        const detail::Vec5 r_up =
            detail::smooth_fit_residual(up, sol.coeffs, sol.params.c, edge_slope,
                                        sol.params.delta_cap);
        const detail::Vec5 r_down =
            detail::smooth_fit_residual(down, sol.coeffs, sol.params.c, edge_slope,
                                        sol.params.delta_cap);
        detail::Vec5 fd{};
        double column_scale = 0.0;
        for (int i = 0; i < 5; ++i) {
            fd[i] = (r_up[i] - r_down[i]) / (2.0 * h);
            column_scale = std::max({column_scale, std::abs(fd[i]), std::abs(jac[i][j])});
        }
        // entries tiny relative to their column are below the finite-difference
        // noise floor and immaterial to the Newton step
        for (int i = 0; i < 5; ++i) {
            const double scale = std::max({std::abs(jac[i][j]), std::abs(fd[i]),
                                           1e-3 * column_scale, 1e-6});
            CHECK(std::abs(jac[i][j] - fd[i]) / scale <= 1e-5);
        }
    }
}

TEST_CASE("with mu = lambda = 0 the five-equation solution reduces to the base one") {
    ModelParams params = refs::problem1();
    const ExtendedSolution ext = solve_extended(params);
    const BaseSolution base = solve_base(params);
    CHECK(std::abs(ext.x_low - base.x_low) <= 1e-8);
    CHECK(std::abs(ext.x_star - base.x_star) <= 1e-8);
    CHECK(std::abs(ext.x_high - base.x_high) <= 1e-8);

    const ExtendedValueFunction evf(ext);
    const BaseValueFunction bvf(base);
    for (int i = 1; i < 101; ++i) {
        const double x = 5.0 * i / 101.0;
        CHECK(std::abs(evf(x) - bvf(x)) <= 1e-8);
    }
    // the exponential pair agrees with the symmetric representation pointwise
    for (int i = 0; i <= 20; ++i) {
        const double x = 0.5 + 4.0 * i / 20.0;
        const double pair = ext.coeff_grow * std::exp(ext.coeffs.root_pos * x) +
                            ext.coeff_decay * std::exp(ext.coeffs.root_neg * x);
        const double symmetric = 2.0 * base.exp_coeff *
                                 std::cosh(base.coeffs.exp_rate * (x - base.x_star));
        CHECK(std::abs(pair - symmetric) <= 1e-8);
    }
}

TEST_CASE("problem 3 converges to the frozen thresholds with verified conditions") {
    const ExtendedSolution sol = solve_extended(refs::problem3());
    CHECK(sol.residual_norm <= 1e-9);
    CHECK(std::abs(sol.x_low - refs::p3_x_low) <= 1e-9);
    CHECK(std::abs(sol.x_star - refs::p3_x_star) <= 1e-9);
    CHECK(std::abs(sol.x_high - refs::p3_x_high) <= 1e-9);
    CHECK(sol.coeff_grow == doctest::Approx(refs::p3_coeff_grow).epsilon(1e-6));
    CHECK(sol.coeff_decay == doctest::Approx(refs::p3_coeff_decay).epsilon(1e-10));
    CHECK(sol.phi().value(sol.x_star) == doctest::Approx(refs::p3_peak_value).epsilon(1e-10));

    CHECK(sol.conditions.order_condition);
    CHECK(sol.conditions.curvature_at_star);
    CHECK(sol.conditions.sign_pattern);
    CHECK(sol.conditions.star_between_inflections);
    CHECK(sol.conditions.restart_in_band);
    CHECK(sol.conditions.all());
    // with lambda = 0 the membership state reduces to the payoff vertex
    CHECK(sol.conditions.x_hat == doctest::Approx(sol.coeffs.x_vertex).epsilon(1e-15));
    CHECK(sol.conditions.inflect_low > sol.x_low);
    CHECK(sol.conditions.inflect_high < sol.x_high);
    CHECK(sol.phi().d2(sol.conditions.inflect_low) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-8));

    // drift skews the value curve: strictly asymmetric about the restart state
    const ExtendedValueFunction vf(sol);
    const double off = 0.5 * std::min(sol.x_star - sol.x_low, sol.x_high - sol.x_star);
    CHECK(std::abs(vf(sol.x_star + off) - vf(sol.x_star - off)) > 1e-3);
}

TEST_CASE("problem 4 converges and pastes with the state-cost slope") {
    const ExtendedSolution sol = solve_extended(refs::problem4());
    CHECK(sol.residual_norm <= 1e-9);
    CHECK(std::abs(sol.x_low - refs::p4_x_low) <= 1e-9);
    CHECK(std::abs(sol.x_star - refs::p4_x_star) <= 1e-8);
    CHECK(std::abs(sol.x_high - refs::p4_x_high) <= 1e-9);
    CHECK(sol.conditions.all());
    CHECK(sol.conditions.x_hat == doctest::Approx(refs::p4_x_hat).epsilon(1e-12));

    const ExtendedPhi phi = sol.phi();
    const double edge_slope = 0.5 / 5.0;
    CHECK(std::abs(phi.d1(sol.x_low) - edge_slope) <= 1e-9);
    CHECK(std::abs(phi.d1(sol.x_high) - edge_slope) <= 1e-9);
    CHECK(std::abs(phi.d1(sol.x_star)) <= 1e-9);
    CHECK(phi.d2(sol.x_star) < 0.0);
}

TEST_CASE("a supplied initial guess short-circuits the continuation") {
    const ExtendedSolution first = solve_extended(refs::problem4());
    const ExtendedSolution again = solve_extended(refs::problem4(), first);
    CHECK(std::abs(again.x_low - first.x_low) <= 1e-9);
    CHECK(std::abs(again.x_high - first.x_high) <= 1e-9);
    CHECK(again.residual_norm <= 1e-9);
}

TEST_CASE("extended value function pastes continuously with slope lambda/delta") {
    const ExtendedSolution sol = solve_extended(refs::problem4());
    const ExtendedValueFunction vf(sol);
    const double edge_slope = sol.params.lambda / sol.params.delta_cap;

    for (double boundary : {sol.x_low, sol.x_high}) {
        CHECK(std::abs(vf(boundary - 1e-9) - vf(boundary + 1e-9)) <= 1e-8);
        const double h = 1e-7;
        const double left = (vf(boundary) - vf(boundary - h)) / h;
        const double right = (vf(boundary + h) - vf(boundary)) / h;
        CHECK(std::abs(left - edge_slope) <= 1e-6);
        CHECK(std::abs(right - edge_slope) <= 1e-6);
    }
    CHECK_THROWS_AS(vf(-0.5), DomainError);
    CHECK_THROWS_AS(vf(0.0), DomainError);
    CHECK_THROWS_AS(vf(5.0), DomainError);
    CHECK_THROWS_AS(vf(6.1), DomainError);
}

TEST_CASE("for lambda = 0 the outside branch is the constant of the base form") {
    const ExtendedSolution sol = solve_extended(refs::problem3());
    const ExtendedValueFunction vf(sol);
    const double constant = sol.phi().value(sol.x_star) - sol.params.c;
    CHECK(vf(sol.x_low * 0.5) == doctest::Approx(constant).epsilon(1e-12));
    CHECK(vf(0.5 * (sol.x_high + 5.0)) == doctest::Approx(constant).epsilon(1e-12));
}

TEST_CASE("extended QVI residuals: active branches vanish, inactive stay negative") {
    for (const ModelParams& params : {refs::problem3(), refs::problem4()}) {
        const ExtendedSolution sol = solve_extended(params);
        const QviReport report = extended_qvi_residual(sol, default_extended_qvi_grid(sol));
        CHECK(report.points.size() > 1900);
        CHECK(report.max_term <= 1e-6);
        CHECK(report.min_active_term >= -1e-6);
        for (const QviPoint& pt : report.points) {
            if (pt.in_continuation) {
                CHECK(std::abs(pt.ode_term) <= 1e-9);
            } else {
                CHECK(std::abs(pt.intervention_term) <= 1e-9);
            }
        }
    }
}

TEST_CASE("extended QVI checker rejects out-of-domain and boundary grids") {
    const ExtendedSolution sol = solve_extended(refs::problem3());
    CHECK_THROWS_AS(extended_qvi_residual(sol, std::vector<double>{-1.0}), GridError);
    CHECK_THROWS_AS(extended_qvi_residual(sol, std::vector<double>{5.5}), GridError);
    CHECK_THROWS_AS(extended_qvi_residual(sol, std::vector<double>{sol.x_high}), GridError);
}

TEST_CASE("damping contract: accepted residual norms decrease monotonically") {
    const ExtendedSolution sol = solve_extended(refs::problem4());
    const detail::Vec5 coarse{sol.coeff_grow * 1.4, sol.coeff_decay * 0.8, sol.x_low - 0.2,
                              sol.x_star + 0.2, sol.x_high + 0.1};
    const std::vector<double> trace =
        detail::newton_residual_trace(refs::problem4(), coarse);
    REQUIRE(trace.size() >= 3);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] < trace[i - 1]);
    CHECK(trace.back() <= 1e-10);
}

TEST_CASE("policy triple mirrors the converged thresholds") {
    const ExtendedSolution sol = solve_extended(refs::problem3());
    const PolicyThresholds pol = optimal_policy(sol);
    CHECK(pol.x_low == sol.x_low);
    CHECK(pol.x_star == sol.x_star);
    CHECK(pol.x_high == sol.x_high);
}
