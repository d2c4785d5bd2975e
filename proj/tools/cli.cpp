#include "cli.hpp"

#include "priceband/analysis.hpp"
#include "priceband/base_solver.hpp"
#include "priceband/extended_solver.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <sstream>

namespace priceband::cli {

using nlohmann::json;

namespace {

std::string fmt15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

void expect_keys(const json& obj, const std::string& block,
                 std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) known = true;
        if (!known)
            throw ConfigError("unknown key '" + item.key() + "' in block '" + block + "'");
    }
}

double need_number(const json& obj, const std::string& block, const char* key) {
    if (!obj.contains(key))
        throw ConfigError("missing key '" + std::string(key) + "' in block '" + block + "'");
    if (!obj[key].is_number())
        throw ConfigError("key '" + std::string(key) + "' in block '" + block +
                          "' must be a number");
    return obj[key].get<double>();
}

double opt_number(const json& obj, const std::string& block, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError("key '" + std::string(key) + "' in block '" + block +
                          "' must be a number");
    return obj[key].get<double>();
}

json coefficients_doc(const PayoffCoefficients& k) {
    return json{{"alpha", k.alpha},
                {"x_vertex", k.x_vertex},
                {"y_vertex", k.y_vertex},
                {"x_zero", k.x_zero},
                {"share_at_vertex", k.share_at_vertex},
                {"exp_rate", k.exp_rate},
                {"quad_coeff", k.quad_coeff},
                {"const_coeff", k.const_coeff},
                {"exp_coeff_max", k.exp_coeff_max},
                {"root_pos", k.root_pos},
                {"root_neg", k.root_neg},
                {"lin_coeff", k.lin_coeff},
                {"const_shift", k.const_shift}};
}

json model_doc(const ModelParams& p) {
    return json{{"rho", p.rho}, {"sigma", p.sigma}, {"b", p.b},       {"delta", p.delta_cap},
                {"c", p.c},     {"mu", p.mu},       {"lambda", p.lambda}};
}

json condition_doc(const ConditionReport& rep) {
    json doc{{"order_condition", rep.order_condition},
             {"curvature_at_star", rep.curvature_at_star},
             {"sign_pattern", rep.sign_pattern},
             {"star_between_inflections", rep.star_between_inflections},
             {"x_hat", rep.x_hat},
             {"restart_in_band", rep.restart_in_band},
             {"satisfied", rep.all()}};
    if (std::isfinite(rep.inflect_low)) doc["inflect_low"] = rep.inflect_low;
    if (std::isfinite(rep.inflect_high)) doc["inflect_high"] = rep.inflect_high;
    return doc;
}

struct SolvedModel {
    bool extended;
    std::optional<BaseSolution> base;
    std::optional<ExtendedSolution> ext;

    PolicyThresholds policy() const {
        return extended ? optimal_policy(*ext) : optimal_policy(*base);
    }
    double restart_state() const { return extended ? ext->x_star : base->x_star; }
};

SolvedModel solve_for(const RunConfig& config, bool force_extended) {
    const bool extended = force_extended || config.solve_mode == "extended" ||
                          (config.solve_mode == "auto" && wants_extended(config));
    SolvedModel solved;
    solved.extended = extended;
    if (extended)
        solved.ext = solve_extended(config.model);
    else
        solved.base = solve_base(config.model);
    return solved;
}

} // namespace

bool wants_extended(const RunConfig& config) {
    return config.model.mu != 0.0 || config.model.lambda != 0.0;
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("configuration document must be a JSON object");
    expect_keys(doc, "top level",
                {"model", "solve", "grid", "costs", "simulate",
                 // keys emitted by solve documents, ignored on input
                 "coefficients", "solution", "c_bar", "condition_report"});
    if (!doc.contains("model")) throw ConfigError("missing required block 'model'");

    RunConfig config;
    const json& model = doc["model"];
    if (!model.is_object()) throw ConfigError("block 'model' must be an object");
    expect_keys(model, "model", {"rho", "sigma", "b", "delta", "c", "mu", "lambda"});
    config.model.rho = need_number(model, "model", "rho");
    config.model.sigma = need_number(model, "model", "sigma");
    config.model.b = opt_number(model, "model", "b", 0.0);
    config.model.delta_cap = need_number(model, "model", "delta");
    config.model.c = need_number(model, "model", "c");
    config.model.mu = opt_number(model, "model", "mu", 0.0);
    config.model.lambda = opt_number(model, "model", "lambda", 0.0);
    validate(config.model);

    if (doc.contains("solve")) {
        const json& solve = doc["solve"];
        if (!solve.is_object()) throw ConfigError("block 'solve' must be an object");
        expect_keys(solve, "solve", {"mode", "tol"});
        if (solve.contains("mode")) {
            if (!solve["mode"].is_string())
                throw ConfigError("key 'mode' in block 'solve' must be a string");
            config.solve_mode = solve["mode"].get<std::string>();
            if (config.solve_mode != "auto" && config.solve_mode != "base" &&
                config.solve_mode != "extended")
                throw ConfigError("solve mode must be one of auto|base|extended");
        }
        config.tol = opt_number(solve, "solve", "tol", config.tol);
        if (!(config.tol > 0.0)) throw ConfigError("solve tol must be > 0");
    }

    if (doc.contains("grid")) {
        const json& grid = doc["grid"];
        if (!grid.is_object()) throw ConfigError("block 'grid' must be an object");
        expect_keys(grid, "grid", {"min", "max", "count"});
        GridSpec spec{};
        spec.min = need_number(grid, "grid", "min");
        spec.max = need_number(grid, "grid", "max");
        spec.count = static_cast<long>(need_number(grid, "grid", "count"));
        if (!(spec.max > spec.min)) throw ConfigError("grid max must exceed grid min");
        if (spec.count < 2) throw ConfigError("grid count must be at least 2");
        config.grid = spec;
    }

    if (doc.contains("costs")) {
        const json& costs = doc["costs"];
        if (!costs.is_array()) throw ConfigError("block 'costs' must be an array of numbers");
        for (const json& value : costs) {
            if (!value.is_number()) throw ConfigError("block 'costs' must contain numbers only");
            config.costs.push_back(value.get<double>());
        }
    }

    if (doc.contains("simulate")) {
        const json& sim = doc["simulate"];
        if (!sim.is_object()) throw ConfigError("block 'simulate' must be an object");
        expect_keys(sim, "simulate",
                    {"n_paths", "dt", "horizon", "seed", "initial_x", "policy", "cost_model",
                     "threads", "max_interventions"});
        config.simulate.n_paths =
            static_cast<long>(opt_number(sim, "simulate", "n_paths", 10000.0));
        config.simulate.dt = opt_number(sim, "simulate", "dt", 1e-3);
        config.simulate.horizon = opt_number(sim, "simulate", "horizon", 300.0);
        if (sim.contains("seed")) {
            if (!sim["seed"].is_number_unsigned() && !sim["seed"].is_number_integer())
                throw ConfigError("simulate seed must be a non-negative integer");
            const auto seed = sim["seed"].get<long long>();
            if (seed < 0) throw ConfigError("simulate seed must be a non-negative integer");
            config.simulate.seed = static_cast<std::uint64_t>(seed);
        }
        if (sim.contains("initial_x"))
            config.simulate.initial_x = need_number(sim, "simulate", "initial_x");
        if (sim.contains("policy")) {
            const json& pol = sim["policy"];
            if (!pol.is_object()) throw ConfigError("simulate policy must be an object");
            expect_keys(pol, "simulate.policy", {"x_low", "x_star", "x_high"});
            PolicyThresholds thresholds{};
            thresholds.x_low = need_number(pol, "simulate.policy", "x_low");
            thresholds.x_star = need_number(pol, "simulate.policy", "x_star");
            thresholds.x_high = need_number(pol, "simulate.policy", "x_high");
            if (!(thresholds.x_low < thresholds.x_star && thresholds.x_star < thresholds.x_high))
                throw ConfigError("simulate policy must satisfy x_low < x_star < x_high");
            config.simulate.policy = thresholds;
        }
        if (sim.contains("cost_model")) {
            if (!sim["cost_model"].is_string())
                throw ConfigError("simulate cost_model must be a string");
            const std::string mode = sim["cost_model"].get<std::string>();
            if (mode != "fixed" && mode != "state")
                throw ConfigError("simulate cost_model must be 'fixed' or 'state'");
            config.simulate.cost_model = mode;
        }
        config.simulate.threads = static_cast<int>(opt_number(sim, "simulate", "threads", 1.0));
        config.simulate.max_interventions =
            static_cast<long>(opt_number(sim, "simulate", "max_interventions", 1000000.0));
    }
    return config;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& err) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + err.what());
    }
    return parse_config(doc);
}

RunConfig preset(const std::string& name) {
    RunConfig config;
    if (name == "problem1")
        config.model = {0.03, 0.2, 0.0, 5.0, 2.0, 0.0, 0.0};
    else if (name == "problem2")
        config.model = {0.05, 0.3, 3.0, 5.0, 0.5, 0.0, 0.0};
    else if (name == "problem3")
        config.model = {0.03, 0.25, 0.4, 5.0, 1.5, 0.2, 0.0};
    else if (name == "problem4")
        config.model = {0.05, 0.3, 0.5, 5.0, 1.0, 0.1, 0.5};
    else
        throw ConfigError("unknown preset '" + name +
                          "' (expected problem1|problem2|problem3|problem4)");
    return config;
}

json run_solve(const RunConfig& config, bool force_extended) {
    const SolvedModel solved = solve_for(config, force_extended);
    json doc;
    doc["model"] = model_doc(config.model);
    if (solved.extended) {
        const ExtendedSolution& sol = *solved.ext;
        doc["coefficients"] = coefficients_doc(sol.coeffs);
        doc["solution"] = json{{"kind", "extended"},
                               {"coeff_grow", sol.coeff_grow},
                               {"coeff_decay", sol.coeff_decay},
                               {"x_low", sol.x_low},
                               {"x_star", sol.x_star},
                               {"x_high", sol.x_high},
                               {"residual_norm", sol.residual_norm},
                               {"value_at_star", sol.phi().value(sol.x_star)}};
        doc["condition_report"] = condition_doc(sol.conditions);
    } else {
        const BaseSolution& sol = *solved.base;
        const BaseValueFunction vf(sol);
        doc["coefficients"] = coefficients_doc(sol.coeffs);
        doc["c_bar"] = sol.c_bar;
        doc["solution"] = json{{"kind", "base"},
                               {"exp_coeff", sol.exp_coeff},
                               {"half_width", sol.half_width},
                               {"x_low", sol.x_low},
                               {"x_star", sol.x_star},
                               {"x_high", sol.x_high},
                               {"value_at_star", vf(sol.x_star)},
                               {"intervention_value", vf.intervention_value()}};
    }
    return doc;
}

std::string run_value_curve(const RunConfig& config) {
    const SolvedModel solved = solve_for(config, false);
    const double d = config.model.delta_cap;
    GridSpec grid = config.grid.value_or(
        solved.extended ? GridSpec{d * 1e-6, d * (1.0 - 1e-6), 501} : GridSpec{0.0, d, 501});

    const PolicyThresholds pol = solved.policy();
    std::ostringstream out;
    out << "x,value,phi,region\n";
    for (long i = 0; i < grid.count; ++i) {
        const double x =
            grid.min + (grid.max - grid.min) * static_cast<double>(i) /
                           static_cast<double>(grid.count - 1);
        double value, phi;
        if (solved.extended) {
            const ExtendedValueFunction vf(*solved.ext);
            value = vf(x);
            phi = solved.ext->phi().value(x);
        } else {
            const BaseValueFunction vf(*solved.base);
            value = vf(x);
            phi = vf.phi(x);
        }
        const bool continuation = x > pol.x_low && x < pol.x_high;
        out << fmt15(x) << ',' << fmt15(value) << ',' << fmt15(phi) << ','
            << (continuation ? "continuation" : "action") << '\n';
    }
    return out.str();
}

std::string run_sweep_cost(const RunConfig& config) {
    std::vector<double> costs = config.costs;
    if (costs.empty()) {
        if (wants_extended(config))
            throw ConfigError("sweep-cost requires an explicit 'costs' array for extended models");
        // default ladder: 25 geometric points in (1e-6, 0.9 c_bar)
        const BaseSolution probe = solve_base(config.model);
        const double hi = 0.9 * probe.c_bar;
        const double lo = 1e-6;
        for (int i = 0; i < 25; ++i)
            costs.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / 24.0));
    }
    const CostSweep sweep = sweep_costs(config.model, costs);
    const AsymptoticConstants constants = asymptotic_constants(config.model);
    const double x_vertex = sweep.entries.front().solution.coeffs.x_vertex;

    std::ostringstream out;
    out << "c,x_low,x_high,exp_coeff,value_at_star,dvalue_dc_at_star,asym_x_low,asym_x_high\n";
    for (const SweepEntry& entry : sweep.entries) {
        const BaseValueFunction vf(entry.solution);
        const double root4 = std::pow(entry.cost, 0.25);
        out << fmt15(entry.cost) << ',' << fmt15(entry.solution.x_low) << ','
            << fmt15(entry.solution.x_high) << ',' << fmt15(entry.solution.exp_coeff) << ','
            << fmt15(vf(entry.solution.x_star)) << ','
            << fmt15(value_cost_sensitivity(entry.solution, entry.solution.x_star)) << ','
            << fmt15(x_vertex - constants.band_prefactor * root4) << ','
            << fmt15(x_vertex + constants.band_prefactor * root4) << '\n';
    }
    return out.str();
}

json run_simulate(const RunConfig& config) {
    const SolvedModel solved = solve_for(config, false);
    const Model model(config.model);

    SimulationConfig sim;
    sim.n_paths = config.simulate.n_paths;
    sim.dt = config.simulate.dt;
    sim.horizon = config.simulate.horizon;
    sim.seed = config.simulate.seed;
    sim.policy = config.simulate.policy.value_or(solved.policy());
    sim.initial_x = config.simulate.initial_x.value_or(solved.restart_state());
    sim.threads = config.simulate.threads;
    sim.max_interventions_per_path = config.simulate.max_interventions;
    const std::string cost_mode =
        config.simulate.cost_model.value_or(config.model.lambda > 0.0 ? "state" : "fixed");
    sim.cost_model =
        cost_mode == "state" ? CostModel::StateDependentCost : CostModel::FixedCost;

    const SimulationReport report = simulate(model, sim);

    json doc;
    doc["model"] = model_doc(config.model);
    doc["simulate"] = json{{"n_paths", sim.n_paths},
                           {"dt", sim.dt},
                           {"horizon", sim.horizon},
                           {"seed", sim.seed},
                           {"initial_x", sim.initial_x},
                           {"policy", json{{"x_low", sim.policy.x_low},
                                           {"x_star", sim.policy.x_star},
                                           {"x_high", sim.policy.x_high}}},
                           {"cost_model", cost_mode},
                           {"threads", sim.threads},
                           {"max_interventions", sim.max_interventions_per_path}};
    doc["report"] = json{{"j_estimate", report.j_estimate},
                         {"std_error", report.std_error},
                         {"tail_bound", report.tail_bound},
                         {"interventions_per_path", report.interventions_per_path},
                         {"mean_first_exit_time", report.mean_first_exit_time},
                         {"n_paths", report.n_paths},
                         {"seed", report.seed}};
    return doc;
}

QviOutcome run_qvi_check(const RunConfig& config) {
    const SolvedModel solved = solve_for(config, false);

    std::vector<double> grid;
    if (config.grid) {
        for (long i = 0; i < config.grid->count; ++i)
            grid.push_back(config.grid->min + (config.grid->max - config.grid->min) *
                                                  static_cast<double>(i) /
                                                  static_cast<double>(config.grid->count - 1));
    }

    QviReport report;
    if (solved.extended) {
        if (grid.empty()) grid = default_extended_qvi_grid(*solved.ext);
        report = extended_qvi_residual(*solved.ext, grid);
    } else {
        if (grid.empty()) grid = default_qvi_grid(*solved.base);
        report = qvi_residual(BaseValueFunction(*solved.base), grid);
    }

    QviOutcome outcome;
    std::ostringstream out;
    out << "x,ode_term,intervention_term,region\n";
    for (const QviPoint& pt : report.points)
        out << fmt15(pt.x) << ',' << fmt15(pt.ode_term) << ',' << fmt15(pt.intervention_term)
            << ',' << (pt.in_continuation ? "continuation" : "action") << '\n';
    outcome.csv = out.str();
    outcome.pass = report.within(config.tol);
    outcome.summary = json{{"max_term", report.max_term},
                           {"min_active_term", report.min_active_term},
                           {"tol", config.tol},
                           {"n_points", report.points.size()},
                           {"pass", outcome.pass}};
    return outcome;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path dir = target.parent_path();
    if (dir.empty()) dir = ".";
    const auto tick = std::chrono::steady_clock::now().time_since_epoch().count();
    const fs::path tmp = dir / (target.filename().string() + ".tmp" + std::to_string(tick));
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
        out << contents;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw ConfigError("failed while writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ConfigError("cannot rename temporary file into '" + path + "'");
    }
}

namespace {

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_file_atomic(out_path, text);
}

json error_doc(const char* category, const std::string& message) {
    return json{{"error", json{{"category", category}, {"message", message}}}};
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"priceband: optimal price-adjustment band policies for retail energy spreads"};
    app.require_subcommand(1);

    std::string config_path, preset_name, out_path;
    double tol = -1.0;
    long long seed = -1;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON configuration file");
        cmd->add_option("--preset", preset_name,
                        "built-in parameter preset (problem1|problem2|problem3|problem4)");
        cmd->add_option("--out", out_path, "output path (stdout when omitted)");
        cmd->add_option("--seed", seed, "override simulate.seed");
        cmd->add_option("--tol", tol, "override the qvi-check tolerance");
    };

    CLI::App* cmd_solve = app.add_subcommand("solve", "solve the smooth-fit system");
    CLI::App* cmd_extended =
        app.add_subcommand("extended-solve", "solve with the extended five-equation system");
    CLI::App* cmd_curve = app.add_subcommand("value-curve", "tabulate the value function");
    CLI::App* cmd_sweep = app.add_subcommand("sweep-cost", "solve across a cost ladder");
    CLI::App* cmd_sim = app.add_subcommand("simulate", "Monte Carlo estimate of the policy value");
    CLI::App* cmd_qvi = app.add_subcommand("qvi-check", "verify the variational inequality");
    for (CLI::App* cmd : {cmd_solve, cmd_extended, cmd_curve, cmd_sweep, cmd_sim, cmd_qvi})
        add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::CallForAllHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& err) {
        std::cerr << error_doc("config", err.what()).dump() << '\n';
        return 2;
    }

    try {
        RunConfig config;
        if (!config_path.empty() && !preset_name.empty())
            throw ConfigError("give either --config or --preset, not both");
        if (!config_path.empty())
            config = load_config_file(config_path);
        else if (!preset_name.empty())
            config = preset(preset_name);
        else
            throw ConfigError("one of --config or --preset is required");
        if (seed >= 0) config.simulate.seed = static_cast<std::uint64_t>(seed);
        if (tol > 0.0) config.tol = tol;

        if (cmd_solve->parsed() || cmd_extended->parsed()) {
            emit(run_solve(config, cmd_extended->parsed()).dump(2) + "\n", out_path);
        } else if (cmd_curve->parsed()) {
            emit(run_value_curve(config), out_path);
        } else if (cmd_sweep->parsed()) {
            emit(run_sweep_cost(config), out_path);
        } else if (cmd_sim->parsed()) {
            emit(run_simulate(config).dump(2) + "\n", out_path);
        } else if (cmd_qvi->parsed()) {
            const QviOutcome outcome = run_qvi_check(config);
            emit(outcome.csv, out_path);
            std::cerr << outcome.summary.dump() << '\n';
            return outcome.pass ? 0 : 4;
        }
        return 0;
    } catch (const ConditionViolationError& err) {
        json doc = error_doc("condition-violation", err.what());
        doc["error"]["solution"] = json{{"coeff_grow", err.solution.coeff_grow},
                                        {"coeff_decay", err.solution.coeff_decay},
                                        {"x_low", err.solution.x_low},
                                        {"x_star", err.solution.x_star},
                                        {"x_high", err.solution.x_high},
                                        {"residual_norm", err.solution.residual_norm}};
        doc["error"]["condition_report"] = condition_doc(err.solution.conditions);
        std::cerr << doc.dump() << '\n';
        return 4;
    } catch (const CostTooLargeError& err) {
        json doc = error_doc("solver", err.what());
        doc["error"]["c_bar"] = err.cost_limit;
        doc["error"]["c"] = err.cost;
        std::cerr << doc.dump() << '\n';
        return 3;
    } catch (const NoConvergenceError& err) {
        json doc = error_doc("solver", err.what());
        doc["error"]["residual_norm"] = err.residual_norm;
        std::cerr << doc.dump() << '\n';
        return 3;
    } catch (const ConfigError& err) {
        std::cerr << error_doc("config", err.what()).dump() << '\n';
        return 2;
    } catch (const InvalidParameterError& err) {
        std::cerr << error_doc("config", err.what()).dump() << '\n';
        return 2;
    } catch (const GridError& err) {
        std::cerr << error_doc("config", err.what()).dump() << '\n';
        return 2;
    } catch (const SimulationError& err) {
        std::cerr << error_doc("config", err.what()).dump() << '\n';
        return 2;
    } catch (const DomainError& err) {
        std::cerr << error_doc("config", err.what()).dump() << '\n';
        return 2;
    } catch (const Error& err) {
        std::cerr << error_doc("solver", err.what()).dump() << '\n';
        return 3;
    } catch (const std::exception& err) {
        std::cerr << error_doc("internal", err.what()).dump() << '\n';
        return 3;
    }
}

} // namespace priceband::cli
