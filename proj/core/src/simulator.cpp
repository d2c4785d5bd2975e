#include "priceband/simulator.hpp"

#include "priceband/errors.hpp"
#include "priceband/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

namespace priceband {

void validate(const SimulationConfig& config) {
    if (!(config.n_paths >= 1))
        throw SimulationError("simulation config: n_paths must be >= 1");
    if (!(config.dt > 0.0)) throw SimulationError("simulation config: dt must be > 0");
    if (!(config.horizon > 0.0)) throw SimulationError("simulation config: horizon must be > 0");
    if (!(config.policy.x_low < config.policy.x_star && config.policy.x_star < config.policy.x_high))
        throw SimulationError("simulation config: policy must satisfy x_low < x_star < x_high");
    if (!std::isfinite(config.initial_x))
        throw SimulationError("simulation config: initial_x must be finite");
    if (config.threads < 0) throw SimulationError("simulation config: threads must be >= 0");
    if (!(config.max_interventions_per_path >= 1))
        throw SimulationError("simulation config: max_interventions_per_path must be >= 1");
}

namespace {

long step_count(const SimulationConfig& config) {
    return std::max<long>(1, std::llround(config.horizon / config.dt));
}

} // namespace

PathStats simulate_path(const Model& model, const SimulationConfig& config,
                        std::uint64_t path_index) {
    const ModelParams& p = model.params();
    const long n_steps = step_count(config);
    const double dt = config.dt;
    const double drift = -p.mu * dt;
    const double noise_scale = p.sigma * std::sqrt(dt);
    const double decay = std::exp(-p.rho * dt);
    const double lo = config.policy.x_low;
    const double hi = config.policy.x_high;
    const bool state_cost = config.cost_model == CostModel::StateDependentCost;

    NormalSampler normal(path_stream(config.seed, path_index));
    PathStats st;
    st.first_exit_time = config.horizon;
    st.min_cost_charged = std::numeric_limits<double>::infinity();
    st.max_cost_charged = -std::numeric_limits<double>::infinity();

    double x = config.initial_x;
    double discount = 1.0;

    const auto intervene = [&](double time_discount, double pre_jump_x) {
        const double cost = state_cost ? model.intervention_cost(pre_jump_x) : p.c;
        st.payoff -= time_discount * cost;
        st.min_cost_charged = std::min(st.min_cost_charged, cost);
        st.max_cost_charged = std::max(st.max_cost_charged, cost);
        x = config.policy.x_star;
        st.restart_deviation =
            std::max(st.restart_deviation, std::abs(x - config.policy.x_star));
        if (++st.interventions > config.max_interventions_per_path)
            throw SimulationError(
                "path " + std::to_string(path_index) + " exceeded " +
                std::to_string(config.max_interventions_per_path) +
                " interventions; dt is too coarse or the thresholds are degenerate");
    };

    if (x <= lo || x >= hi) {
        st.exited = true;
        st.first_exit_time = 0.0;
        intervene(1.0, x);
    }
    for (long n = 0; n < n_steps; ++n) {
        st.payoff += discount * model.running_payoff(x) * dt;
        x += drift + noise_scale * normal();
        discount *= decay;
        // periodic exact refresh keeps the multiplicative discount from drifting
        if ((n & 1023) == 1023) discount = std::exp(-p.rho * dt * static_cast<double>(n + 1));
        if (x <= lo || x >= hi) {
            if (!st.exited) {
                st.exited = true;
                st.first_exit_time = static_cast<double>(n + 1) * dt;
            }
            intervene(discount, x);
        }
    }
    if (st.interventions == 0) {
        st.min_cost_charged = 0.0;
        st.max_cost_charged = 0.0;
    }
    return st;
}

std::vector<PathStats> simulate_paths(const Model& model, const SimulationConfig& config) {
    validate(config);
    const long n = config.n_paths;
    std::vector<PathStats> stats(static_cast<std::size_t>(n));

    unsigned workers = config.threads == 0 ? std::thread::hardware_concurrency()
                                           : static_cast<unsigned>(config.threads);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));

    if (workers == 1) {
        for (long i = 0; i < n; ++i)
            stats[static_cast<std::size_t>(i)] =
                simulate_path(model, config, static_cast<std::uint64_t>(i));
        return stats;
    }

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(workers);
    const long chunk = (n + static_cast<long>(workers) - 1) / static_cast<long>(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const long beg = static_cast<long>(w) * chunk;
        const long end = std::min(n, beg + chunk);
        pool.emplace_back([&, w, beg, end] {
            try {
                for (long i = beg; i < end; ++i)
                    stats[static_cast<std::size_t>(i)] =
                        simulate_path(model, config, static_cast<std::uint64_t>(i));
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
    return stats;
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 16) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

double mean_of(std::span<const double> values) {
    return pairwise_sum(values) / static_cast<double>(values.size());
}

double std_error_of(std::span<const double> values, double mean) {
    if (values.size() < 2) return 0.0;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mean;
        sq[i] = d * d;
    }
    const double variance = pairwise_sum(sq) / static_cast<double>(values.size() - 1);
    return std::sqrt(variance / static_cast<double>(values.size()));
}

SimulationReport build_report(const Model& model, const SimulationConfig& config,
                              const std::vector<PathStats>& stats) {
    const std::size_t n = stats.size();
    std::vector<double> column(n);
    SimulationReport report{};
    report.n_paths = config.n_paths;
    report.seed = config.seed;
    for (std::size_t i = 0; i < n; ++i) column[i] = stats[i].payoff;
    report.j_estimate = mean_of(column);
    report.std_error = std_error_of(column, report.j_estimate);
    report.tail_bound = model.coeffs().y_vertex / model.params().rho *
                        std::exp(-model.params().rho * config.horizon);
    for (std::size_t i = 0; i < n; ++i) column[i] = static_cast<double>(stats[i].interventions);
    report.interventions_per_path = mean_of(column);
    for (std::size_t i = 0; i < n; ++i) column[i] = stats[i].first_exit_time;
    report.mean_first_exit_time = mean_of(column);
    return report;
}

} // namespace

SimulationReport simulate(const Model& model, const SimulationConfig& config) {
    return build_report(model, config, simulate_paths(model, config));
}

PolicyComparison compare_policies(const Model& model, std::span<const SimulationConfig> configs) {
    if (configs.empty()) throw SimulationError("compare_policies: empty config list");
    const SimulationConfig& ref = configs.front();
    for (const SimulationConfig& cfg : configs) {
        if (cfg.seed != ref.seed || cfg.n_paths != ref.n_paths || cfg.dt != ref.dt ||
            cfg.horizon != ref.horizon)
            throw SimulationError(
                "compare_policies: configs must share seed, n_paths, dt and horizon "
                "(common random numbers)");
    }

    PolicyComparison cmp;
    std::vector<std::vector<double>> payoffs(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const std::vector<PathStats> stats = simulate_paths(model, configs[i]);
        payoffs[i].resize(stats.size());
        for (std::size_t k = 0; k < stats.size(); ++k) payoffs[i][k] = stats[k].payoff;
        cmp.reports.push_back(build_report(model, configs[i], stats));
    }

    cmp.ranking.resize(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) cmp.ranking[i] = i;
    std::stable_sort(cmp.ranking.begin(), cmp.ranking.end(), [&](std::size_t a, std::size_t b) {
        return cmp.reports[a].j_estimate > cmp.reports[b].j_estimate;
    });

    const std::size_t n_paths = payoffs.front().size();
    std::vector<double> diff(n_paths);
    for (std::size_t i = 0; i < configs.size(); ++i) {
        for (std::size_t j = i + 1; j < configs.size(); ++j) {
            for (std::size_t k = 0; k < n_paths; ++k) diff[k] = payoffs[i][k] - payoffs[j][k];
            PolicyDifference d{};
            d.first = i;
            d.second = j;
            d.mean_difference = mean_of(diff);
            d.std_error = std_error_of(diff, d.mean_difference);
            cmp.differences.push_back(d);
        }
    }
    return cmp;
}

ExitTimeStats first_exit_time_stats(const Model& model, const SimulationConfig& config) {
    validate(config);
    const ModelParams& p = model.params();
    const long n_steps = step_count(config);
    const double dt = config.dt;
    const double drift = -p.mu * dt;
    const double noise_scale = p.sigma * std::sqrt(dt);
    const double lo = config.policy.x_low;
    const double hi = config.policy.x_high;

    std::vector<double> times(static_cast<std::size_t>(config.n_paths));
    std::vector<double> discounts(times.size());
    long censored = 0;
    for (long i = 0; i < config.n_paths; ++i) {
        NormalSampler normal(path_stream(config.seed, static_cast<std::uint64_t>(i)));
        double x = config.initial_x;
        double tau = config.horizon;
        bool exited = x <= lo || x >= hi;
        if (exited) {
            tau = 0.0;
        } else {
            for (long n = 0; n < n_steps; ++n) {
                x += drift + noise_scale * normal();
                if (x <= lo || x >= hi) {
                    tau = static_cast<double>(n + 1) * dt;
                    exited = true;
                    break;
                }
            }
        }
        if (!exited) ++censored;
        times[static_cast<std::size_t>(i)] = tau;
        discounts[static_cast<std::size_t>(i)] = std::exp(-p.rho * tau);
    }

    ExitTimeStats stats{};
    stats.n_paths = config.n_paths;
    stats.censored = censored;
    stats.mean = pairwise_sum(times) / static_cast<double>(times.size());
    stats.mean_discount = pairwise_sum(discounts) / static_cast<double>(discounts.size());
    std::vector<double> sorted = times;
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const std::size_t idx = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(idx);
        if (idx + 1 >= sorted.size()) return sorted.back();
        return sorted[idx] * (1.0 - frac) + sorted[idx + 1] * frac;
    };
    stats.q10 = quantile(0.10);
    stats.median = quantile(0.50);
    stats.q90 = quantile(0.90);
    return stats;
}

} // namespace priceband
