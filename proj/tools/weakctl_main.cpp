#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <fstream>
#include <iostream>
#include <sstream>

#include "weakctl/config.hpp"
#include "weakctl/scenario.hpp"

namespace fs = std::filesystem;
using namespace weakctl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSim = 3;
constexpr int kExitBoundViolated = 4;

struct GlobalOptions {
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool svg = false;
};

std::string run_id(const std::string& config_path) {
    return fs::path(config_path).stem().string();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path.string());
    out << content;
}

fs::path prepare_out_dir(const config::RunConfig& cfg, const GlobalOptions& global) {
    fs::path dir = global.out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(global.out_dir);
    fs::create_directories(dir);
    return dir;
}

config::RunConfig load_config(const std::string& path, const GlobalOptions& global) {
    auto cfg = config::load(path);
    if (global.seed) cfg.disturbance.seed = *global.seed;
    return cfg;
}

scenario::DemoSetup demo_setup(const config::RunConfig& cfg) {
    scenario::DemoSetup setup;
    setup.specs = config::build_specs(cfg);
    setup.plants = config::build_plants(cfg);
    setup.models = config::build_models(cfg);
    setup.f = cfg.filter_f;
    setup.disturbance = config::build_disturbance(cfg);
    setup.reference = config::build_reference(cfg);
    setup.step = cfg.step;
    return setup;
}

int cmd_demo(const std::string& config_path, const GlobalOptions& global) {
    config::RunConfig cfg;
    try {
        cfg = load_config(config_path, global);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const auto result = scenario::case_study_demo(demo_setup(cfg));
        const auto dir = prepare_out_dir(cfg, global);
        const auto id = run_id(config_path);

        scenario::write_trace_csv((dir / (id + "_caseA.csv")).string(), result.trace_a);
        scenario::write_trace_csv((dir / (id + "_caseB.csv")).string(), result.trace_b);
        if (global.svg) {
            write_file(dir / (id + "_caseA.svg"), scenario::trace_to_svg(result.trace_a));
            write_file(dir / (id + "_caseB.svg"), scenario::trace_to_svg(result.trace_b));
        }

        std::ostringstream costs;
        costs << "k,t,cost_caseA,cost_caseB\n";
        for (std::size_t k = 0; k < result.trace_a.length(); ++k) {
            char line[128];
            std::snprintf(line, sizeof(line), "%zu,%.15g,%.15g,%.15g\n", k,
                          static_cast<double>(k) * cfg.step,
                          result.trace_a.cost.samples[k], result.trace_b.cost.samples[k]);
            costs << line;
        }
        write_file(dir / (id + "_costs.csv"), costs.str());

        std::ostringstream report;
        report << "rms_tracking_caseA: " << result.report.rms_a << "\n"
               << "rms_tracking_caseB: " << result.report.rms_b << "\n"
               << "total_cost_caseA: " << result.report.cost_a_total << "\n"
               << "total_cost_caseB: " << result.report.cost_b_total << "\n"
               << "cost_reduced: " << (result.report.cost_reduced ? "yes" : "no") << "\n";
        for (std::size_t i = 0; i < result.report.saving_a.size(); ++i)
            report << "saving_caseA_consumer_" << (i + 1) << ": "
                   << result.report.saving_a[i] << "\n";
        for (std::size_t i = 0; i < result.report.saving_b.size(); ++i)
            report << "saving_caseB_consumer_" << (i + 1) << ": "
                   << result.report.saving_b[i] << "\n";
        write_file(dir / (id + "_report.txt"), report.str());
        std::cout << report.str();
        return kExitOk;
    } catch (const ConfigMismatch& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitSim;
    }
}

int cmd_bound(const std::string& config_path, double epsilon, int trials,
              double gamma_scale, const GlobalOptions& global) {
    config::RunConfig cfg;
    try {
        cfg = load_config(config_path, global);
        if (epsilon <= 0.0) throw ConfigError("epsilon: must be positive");
        if (trials < 1) throw ConfigError("trials: must be >= 1");
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const auto specs = config::build_specs(cfg);
        const auto plants_tf = config::build_plants(cfg);
        const auto models = config::build_models(cfg);
        const auto q_tf = imc::build_youla(models, cfg.filter_f);
        const std::size_t steps = config::horizon_steps(cfg);
        const std::size_t n = specs.size();

        lti::SignalTrace zero_ref{cfg.step, std::vector<double>(steps, 0.0)};
        const std::vector<double> weights(n, 1.0 / static_cast<double>(n));

        std::ostringstream table;
        table << "seed,lhs,rhs,ok\n";
        bool all_ok = true;
        std::uint64_t first_violation = 0;
        for (int t = 0; t < trials; ++t) {
            auto dist = config::build_disturbance(cfg);
            dist.seed = cfg.disturbance.seed + static_cast<std::uint64_t>(t);

            const auto d_trace = dist.generate(steps, cfg.step);
            const double d_l2 = lti::l2_norm(d_trace);
            auto gamma = imc::design_gamma(plants_tf, q_tf, d_l2, epsilon, weights);
            for (auto* side : {&gamma.lower, &gamma.upper})
                for (double& g : *side) g *= gamma_scale;

            scenario::PlantSet plants(plants_tf, cfg.step);
            scenario::ControllerSetup controller{imc::InternalModel(models, cfg.step),
                                                 imc::YoulaFilter(q_tf, cfg.step), gamma};
            const auto trace = scenario::run_closed_loop(
                std::move(plants), std::move(controller), specs,
                consumers::DecisionStrategy::adversarial(dist.seed), zero_ref, dist, steps);
            const auto check = scenario::check_disturbance_bound(trace, cfg.filter_f, epsilon);
            char line[128];
            std::snprintf(line, sizeof(line), "%llu,%.15g,%.15g,%d\n",
                          static_cast<unsigned long long>(dist.seed), check.lhs,
                          check.rhs, check.ok ? 1 : 0);
            table << line;
            if (!check.ok && all_ok) {
                all_ok = false;
                first_violation = dist.seed;
            }
        }
        const auto dir = prepare_out_dir(cfg, global);
        write_file(dir / (run_id(config_path) + "_bound.csv"), table.str());
        std::cout << table.str();
        if (!all_ok) {
            std::cerr << "bound violated, first offending seed: " << first_violation << "\n";
            return kExitBoundViolated;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitSim;
    }
}

struct SweepRow {
    double value = 0.0;
    scenario::Metrics metrics;
    double max_abs_y = 0.0;
    std::size_t infeasible_steps = 0;
};

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<double>& values, const GlobalOptions& global) {
    config::RunConfig base;
    try {
        base = load_config(config_path, global);
        if (param != "epsilon" && param != "gamma_scale" && param != "plant_tau" &&
            param != "seed")
            throw ConfigError("sweep: unknown param '" + param + "'");
        if (values.empty()) throw ConfigError("sweep: need at least one value");
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    try {
        std::vector<SweepRow> rows;
        for (double value : values) {
            config::RunConfig cfg = base;
            double gamma_scale = 1.0;
            if (param == "epsilon") {
                cfg.gamma.mode = "design";
                cfg.gamma.epsilon = value;
            } else if (param == "gamma_scale") {
                gamma_scale = value;
            } else if (param == "plant_tau") {
                cfg.plants.preset = "first_order";
                cfg.plants.tau = {value};
            } else {
                cfg.disturbance.seed = static_cast<std::uint64_t>(value);
            }

            const auto specs = config::build_specs(cfg);
            const auto plants_tf = config::build_plants(cfg);
            const auto models = config::build_models(cfg);
            const auto q_tf = imc::build_youla(models, cfg.filter_f);
            auto gamma = config::build_gamma(cfg, q_tf);
            if (gamma_scale != 1.0)
                for (auto* side : {&gamma.lower, &gamma.upper})
                    for (double& g : *side) g *= gamma_scale;

            const std::size_t steps = config::horizon_steps(cfg);
            scenario::PlantSet plants(plants_tf, cfg.step);
            scenario::ControllerSetup controller{imc::InternalModel(models, cfg.step),
                                                 imc::YoulaFilter(q_tf, cfg.step), gamma};
            const auto trace = scenario::run_closed_loop(
                std::move(plants), std::move(controller), specs,
                consumers::DecisionStrategy::selfish(), config::build_reference(cfg),
                config::build_disturbance(cfg), steps);

            SweepRow row;
            row.value = value;
            row.metrics = scenario::compute_metrics(trace, cfg.filter_f);
            for (double y : trace.y.samples) row.max_abs_y = std::max(row.max_abs_y, std::abs(y));
            row.infeasible_steps = trace.infeasible_steps.size();
            rows.push_back(row);
        }

        std::ostringstream table;
        table << "value,rms_tracking,l2_y,total_cost,max_abs_y,infeasible_steps\n";
        for (const auto& row : rows) {
            char line[192];
            std::snprintf(line, sizeof(line), "%.15g,%.15g,%.15g,%.15g,%.15g,%zu\n",
                          row.value, row.metrics.rms_tracking, row.metrics.l2_y,
                          row.metrics.total_cost, row.max_abs_y, row.infeasible_steps);
            table << line;
        }
        const auto dir = prepare_out_dir(base, global);
        write_file(dir / (run_id(config_path) + "_sweep_" + param + ".csv"), table.str());
        std::cout << table.str();
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitSim;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weakctl: set-valued demand-response control simulator"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--out", global.out_dir, "Output directory (overrides config)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Disturbance seed override");
    app.add_flag("--svg", global.svg, "Also emit SVG line charts");

    std::string config_path;
    auto* demo = app.add_subcommand("demo", "Run the two-case comparison study");
    demo->add_option("config", config_path, "Config file")->required();

    double epsilon = 2.0;
    int trials = 100;
    double gamma_scale = 1.0;
    auto* bound = app.add_subcommand("bound", "Verify the disturbance-suppression bound");
    bound->add_option("config", config_path, "Config file")->required();
    bound->add_option("--epsilon", epsilon, "Deviation budget")->required();
    bound->add_option("--trials", trials, "Number of seeded trials")->required();
    bound->add_option("--gamma-scale", gamma_scale, "Scale applied to the designed bounds");

    std::string param;
    std::vector<double> values;
    auto* sweep = app.add_subcommand("sweep", "Parameter sweep with a metrics summary");
    sweep->add_option("config", config_path, "Config file")->required();
    sweep->add_option("--param", param, "One of epsilon, gamma_scale, plant_tau, seed")
        ->required();
    sweep->add_option("--values", values, "Comma-separated values")
        ->required()
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) global.seed = seed_value;

    if (app.got_subcommand(demo)) return cmd_demo(config_path, global);
    if (app.got_subcommand(bound)) return cmd_bound(config_path, epsilon, trials, gamma_scale, global);
    return cmd_sweep(config_path, param, values, global);
}
