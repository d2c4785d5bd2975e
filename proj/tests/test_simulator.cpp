#include "doctest.h"

#include "priceband/base_solver.hpp"
#include "priceband/rng.hpp"
#include "priceband/simulator.hpp"
#include "reference_values.hpp"

#include <cmath>
#include <vector>

using namespace priceband;

namespace {

SimulationConfig problem1_config() {
    SimulationConfig cfg;
    cfg.n_paths = 2000;
    cfg.dt = 2e-3;
    cfg.horizon = 300.0;
    cfg.seed = 20240811;
    cfg.initial_x = 2.5;
    cfg.policy = optimal_policy(solve_base(refs::problem1()));
    return cfg;
}

} // namespace

TEST_CASE("normal sampler: moments of the stream are standard") {
    NormalSampler normal(path_stream(99, 0));
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0, sum3 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = normal();
        sum += z;
        sum2 += z * z;
        sum3 += z * z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(sum3 / n) < 0.03);
}

TEST_CASE("path streams are reproducible and distinct across indices") {
    NormalSampler a(path_stream(7, 3)), b(path_stream(7, 3)), c(path_stream(7, 4));
    bool all_equal = true;
    bool any_equal_cross = false;
    for (int i = 0; i < 100; ++i) {
        const double za = a(), zb = b(), zc = c();
        all_equal = all_equal && (za == zb);
        any_equal_cross = any_equal_cross || (za == zc);
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_cross);
}

TEST_CASE("config validation") {
    SimulationConfig cfg = problem1_config();
    cfg.n_paths = 0;
    CHECK_THROWS_AS(validate(cfg), SimulationError);
    cfg = problem1_config();
    cfg.dt = 0.0;
    CHECK_THROWS_AS(validate(cfg), SimulationError);
    cfg = problem1_config();
    cfg.policy = {3.0, 2.0, 4.0};
    CHECK_THROWS_AS(validate(cfg), SimulationError);
    cfg = problem1_config();
    cfg.policy = {2.0, 3.0, 3.0};
    CHECK_THROWS_AS(validate(cfg), SimulationError);
}

TEST_CASE("near-degenerate noise at the vertex integrates the static payoff") {
    ModelParams params = refs::problem1();
    params.sigma = 1e-8;
    const Model model(params);
    SimulationConfig cfg;
    cfg.n_paths = 4;
    cfg.dt = 1e-3;
    cfg.horizon = 300.0;
    cfg.seed = 5;
    cfg.initial_x = 2.5;
    cfg.policy = {1.18, 2.5, 3.82};
    const SimulationReport report = simulate(model, cfg);
    CHECK(report.interventions_per_path == 0.0);
    CHECK(std::abs(report.j_estimate - refs::p1_static_integral_300) <= 1e-3);
    CHECK(report.tail_bound == doctest::Approx(refs::p1_tail_bound_300).epsilon(1e-10));
}

TEST_CASE("seed determinism: identical configs give identical reports") {
    const Model model(refs::problem1());
    SimulationConfig cfg = problem1_config();
    cfg.n_paths = 400;
    cfg.horizon = 60.0;
    const SimulationReport a = simulate(model, cfg);
    const SimulationReport b = simulate(model, cfg);
    CHECK(a.j_estimate == b.j_estimate);
    CHECK(a.std_error == b.std_error);
    CHECK(a.interventions_per_path == b.interventions_per_path);
    CHECK(a.mean_first_exit_time == b.mean_first_exit_time);
}

TEST_CASE("parallel and serial path execution agree exactly") {
    const Model model(refs::problem1());
    SimulationConfig cfg = problem1_config();
    cfg.n_paths = 600;
    cfg.horizon = 40.0;
    cfg.threads = 1;
    const SimulationReport serial = simulate(model, cfg);
    cfg.threads = 0; // hardware concurrency
    const SimulationReport parallel = simulate(model, cfg);
    CHECK(serial.j_estimate == parallel.j_estimate);
    CHECK(serial.std_error == parallel.std_error);
    CHECK(std::abs(serial.j_estimate - parallel.j_estimate) <= 1e-12);
}

TEST_CASE("per-path bookkeeping: restarts exact, costs within the state-cost range") {
    ModelParams params = refs::problem4();
    const Model model(params);
    SimulationConfig cfg;
    cfg.n_paths = 50;
    cfg.dt = 1e-2;
    cfg.horizon = 150.0;
    cfg.seed = 31;
    cfg.initial_x = 3.0;
    cfg.policy = {1.48, 3.14, 4.35};
    cfg.cost_model = CostModel::StateDependentCost;
    const std::vector<PathStats> stats = simulate_paths(model, cfg);
    long total_interventions = 0;
    for (const PathStats& st : stats) {
        total_interventions += st.interventions;
        CHECK(st.restart_deviation == 0.0);
        if (st.interventions > 0) {
            CHECK(st.min_cost_charged >= params.c);
            CHECK(st.max_cost_charged <= params.c + params.lambda);
        }
    }
    CHECK(total_interventions > 0);
}

TEST_CASE("fixed-cost model charges exactly c") {
    const Model model(refs::problem1());
    SimulationConfig cfg = problem1_config();
    cfg.n_paths = 40;
    cfg.horizon = 200.0;
    const std::vector<PathStats> stats = simulate_paths(model, cfg);
    for (const PathStats& st : stats) {
        if (st.interventions > 0) {
            CHECK(st.min_cost_charged == 2.0);
            CHECK(st.max_cost_charged == 2.0);
        }
    }
}

TEST_CASE("payoffs are bounded by the static ceiling") {
    const Model model(refs::problem1());
    SimulationConfig cfg = problem1_config();
    cfg.n_paths = 500;
    const std::vector<PathStats> stats = simulate_paths(model, cfg);
    const double ceiling = refs::p1_static_value + cfg.dt; // left-rule quadrature slack
    double mean = 0.0;
    for (const PathStats& st : stats) {
        CHECK(st.payoff <= ceiling);
        mean += st.payoff;
    }
    mean /= static_cast<double>(stats.size());
    CHECK(mean < refs::p1_static_value);
}

TEST_CASE("starting outside the band intervenes immediately at full cost") {
    const Model model(refs::problem1());
    SimulationConfig cfg = problem1_config();
    cfg.n_paths = 1;
    cfg.horizon = 1.0;
    cfg.initial_x = 9.0;
    const std::vector<PathStats> stats = simulate_paths(model, cfg);
    CHECK(stats[0].interventions >= 1);
    CHECK(stats[0].first_exit_time == 0.0);
    CHECK(stats[0].exited);
}

TEST_CASE("intervention cap aborts degenerate runs") {
    const Model model(refs::problem1());
    SimulationConfig cfg = problem1_config();
    cfg.n_paths = 2;
    cfg.horizon = 50.0;
    cfg.policy = {2.49, 2.5, 2.51}; // band narrower than one noise step
    cfg.max_interventions_per_path = 100;
    CHECK_THROWS_AS(simulate(model, cfg), SimulationError);
}

TEST_CASE("first exit times match the closed-form mean and transform") {
    const Model model(refs::problem1());
    SimulationConfig cfg = problem1_config();
    cfg.n_paths = 4000;
    cfg.dt = 1e-3;
    const ExitTimeStats stats = first_exit_time_stats(model, cfg);
    // mean exit time of a driftless path from a centered band: half_width^2/sigma^2;
    // sample SE ~ 0.7, discrete monitoring adds a positive O(sqrt(dt)) shift
    CHECK(stats.mean == doctest::Approx(refs::p1_mean_exit_time).epsilon(0.06));
    // discounted transform 1/cosh(rate * half_width), strictly inside (0,1)
    CHECK(stats.mean_discount == doctest::Approx(refs::p1_mean_exit_discount).epsilon(0.05));
    CHECK(stats.mean_discount > 0.0);
    CHECK(stats.mean_discount < 1.0);
    CHECK(stats.q10 < stats.median);
    CHECK(stats.median < stats.q90);
}

TEST_CASE("starting on the boundary exits at time zero") {
    const Model model(refs::problem1());
    SimulationConfig cfg = problem1_config();
    cfg.n_paths = 3;
    cfg.initial_x = cfg.policy.x_high;
    const ExitTimeStats stats = first_exit_time_stats(model, cfg);
    CHECK(stats.mean == 0.0);
    CHECK(stats.q90 == 0.0);
}

TEST_CASE("wider bands exit later, path by path under common noise") {
    const Model model(refs::problem1());
    SimulationConfig narrow = problem1_config();
    narrow.n_paths = 300;
    SimulationConfig wide = narrow;
    const double y = 0.5 * (narrow.policy.x_high - narrow.policy.x_low);
    wide.policy.x_low = narrow.policy.x_star - 2.0 * y;
    wide.policy.x_high = narrow.policy.x_star + 2.0 * y;
    const ExitTimeStats tn = first_exit_time_stats(model, narrow);
    const ExitTimeStats tw = first_exit_time_stats(model, wide);
    CHECK(tw.mean > tn.mean);
    CHECK(tw.median > tn.median);
}

TEST_CASE("compare_policies: identical configs tie exactly, empty list rejected") {
    const Model model(refs::problem1());
    SimulationConfig cfg = problem1_config();
    cfg.n_paths = 300;
    cfg.horizon = 60.0;
    const std::vector<SimulationConfig> twice{cfg, cfg};
    const PolicyComparison cmp = compare_policies(model, twice);
    REQUIRE(cmp.reports.size() == 2);
    CHECK(cmp.reports[0].j_estimate == cmp.reports[1].j_estimate);
    REQUIRE(cmp.differences.size() == 1);
    CHECK(cmp.differences[0].mean_difference == 0.0);
    CHECK(cmp.differences[0].std_error == 0.0);

    CHECK_THROWS_AS(compare_policies(model, std::vector<SimulationConfig>{}), SimulationError);
    std::vector<SimulationConfig> mismatched{cfg, cfg};
    mismatched[1].seed += 1;
    CHECK_THROWS_AS(compare_policies(model, mismatched), SimulationError);
}

TEST_CASE("compare_policies ranks the optimal band above a never-intervene band") {
    const Model model(refs::problem1());
    SimulationConfig optimal = problem1_config();
    optimal.n_paths = 1500;
    SimulationConfig lazy = optimal;
    lazy.policy.x_low = optimal.policy.x_star - 10.0 * 5.0;
    lazy.policy.x_high = optimal.policy.x_star + 10.0 * 5.0;
    const std::vector<SimulationConfig> configs{optimal, lazy};
    const PolicyComparison cmp = compare_policies(model, configs);
    CHECK(cmp.ranking[0] == 0);
    const PolicyDifference& d = cmp.differences[0];
    CHECK(d.mean_difference > 3.0 * d.std_error);
}

TEST_CASE("a worse policy's estimate stays below the analytic optimum") {
    const Model model(refs::problem1());
    SimulationConfig cfg = problem1_config();
    cfg.n_paths = 1500;
    cfg.policy.x_star += 0.5;
    const SimulationReport report = simulate(model, cfg);
    CHECK(report.j_estimate <= refs::p1_peak_value + 3.0 * report.std_error + 0.05);
}

TEST_CASE("simulated value agrees with the analytic one within bias allowance") {
    const Model model(refs::problem1());
    SimulationConfig cfg = problem1_config();
    cfg.n_paths = 3000;
    const SimulationReport report = simulate(model, cfg);
    CHECK(std::abs(report.j_estimate - refs::p1_peak_value) <=
          3.0 * report.std_error + 0.15);
    CHECK(report.std_error > 0.0);
    CHECK(report.interventions_per_path > 1.0);
}

TEST_CASE("pairwise summation is exact on adversarial orderings") {
    std::vector<double> values;
    for (int i = 0; i < 4096; ++i) values.push_back(i % 2 == 0 ? 1e16 : 1.0);
    const double total = pairwise_sum(values);
    CHECK(total == doctest::Approx(2048.0 * (1e16 + 1.0)).epsilon(1e-12));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
    CHECK(pairwise_sum(std::vector<double>{3.5}) == 3.5);
}
