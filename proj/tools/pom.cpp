// pom: batch front-end for the Proof-of-Merit simulator.
//
//   pom simulate   [flags]   per-epoch and summary metrics for one setting
//   pom sweep      [flags]   grid over lower bound x lambda, plus ROC data
//   pom choose-dcp [flags]   designer's lambda per (lower bound, beta)
//   pom ride-demo  [flags]   PoM on a live ridesharing market with a ledger
//   pom calibrate  [flags]   tune qc toward a target mean convergence round
//
// Every flag can also be set in a TOML/INI file passed with --config, using
// the flag name without dashes as key (e.g. `lower-bound = 0.7`).

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "pom/cli/commands.hpp"
#include "pom/cli/csv.hpp"
#include "pom/errors.hpp"

namespace {

double single(const std::vector<double>& values, const char* flag) {
    if (values.size() != 1)
        throw pom::ConfigError(std::string("--") + flag + " takes a single value for this command");
    return values.front();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proof-of-Merit consensus simulator"};
    app.set_config("--config", "", "TOML/INI file with flag values");
    app.require_subcommand(1);
    app.fallthrough();

    pom::cli::ExperimentSpec spec;
    std::vector<double> lambdas;
    std::vector<double> lower_bounds;
    std::vector<double> betas;
    std::uint32_t rounds = spec.epoch.total_rounds;
    std::string out = ".";
    std::string sweep_input;
    bool ci = false;

    app.add_option("--lambda", lambdas, "DCP value(s); a grid for sweep/choose-dcp");
    app.add_option("--lower-bound", lower_bounds, "capability lower bound(s) L");
    app.add_option("--rounds", rounds, "rounds per epoch (T)")->capture_default_str();
    app.add_option("--matchers", spec.epoch.num_solvers, "initial matchers (m_0)")
        ->capture_default_str();
    app.add_option("--epochs", spec.epochs, "epochs per setting")->capture_default_str();
    app.add_flag("--ci", ci, "use the fast CI preset of 50 epochs");
    app.add_option("--alpha", spec.epoch.acceptance_rate, "exogenous acceptance rate")
        ->capture_default_str();
    app.add_option("--qc", spec.epoch.quit_checkpoint, "quit checkpoint in rounds")
        ->capture_default_str();
    app.add_option("--beta", betas, "designer type(s) for choose-dcp");
    app.add_option("--equ-min", spec.equ_min, "minimum mean steady-state matchers")
        ->capture_default_str();
    app.add_option("--ine-max", spec.ine_max, "maximum mean steady-state inefficiency")
        ->capture_default_str();
    app.add_option("--seed", spec.epoch.seed, "master seed")->capture_default_str();
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.add_option("--threads", spec.threads, "worker threads (0 = all cores)");
    app.add_option("--sweep", sweep_input, "choose-dcp: read this sweep.csv instead of simulating");

    auto& ride = spec.ride;
    app.add_option("--riders", ride.initial_riders, "ride-demo: initial riders")
        ->capture_default_str();
    app.add_option("--drivers", ride.initial_drivers, "ride-demo: initial drivers")
        ->capture_default_str();
    app.add_option("--rider-arrivals", ride.arrivals.riders_per_round,
                   "ride-demo: new riders per round");
    app.add_option("--driver-arrivals", ride.arrivals.drivers_per_round,
                   "ride-demo: new drivers per round");
    app.add_option("--p-stay", ride.arrivals.p_stay, "ride-demo: chance a rejecting rider waits")
        ->capture_default_str();
    app.add_option("--city-size", ride.arrivals.population.city_size, "ride-demo: city side")
        ->capture_default_str();
    app.add_option("--threshold-min", ride.arrivals.population.threshold_min,
                   "ride-demo: rider threshold lower bound")->capture_default_str();
    app.add_option("--threshold-max", ride.arrivals.population.threshold_max,
                   "ride-demo: rider threshold upper bound")->capture_default_str();
    app.add_option("--skill-min", ride.skill_min, "ride-demo: matcher skill lower bound")
        ->capture_default_str();
    app.add_option("--skill-max", ride.skill_max, "ride-demo: matcher skill upper bound")
        ->capture_default_str();
    app.add_flag("--optimal-matcher", ride.include_optimal_matcher,
                 "ride-demo: matcher 0 solves optimally");

    auto& cal = spec.calibration;
    app.add_option("--target", cal.target_convergence, "calibrate: target mean convergence")
        ->capture_default_str();
    app.add_option("--qc-min", cal.qc_min, "calibrate: smallest qc")->capture_default_str();
    app.add_option("--qc-max", cal.qc_max, "calibrate: largest qc")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "run epochs for one setting");
    auto* sweep = app.add_subcommand("sweep", "sweep lower bound x lambda");
    auto* choose = app.add_subcommand("choose-dcp", "choose lambda per designer type");
    auto* demo = app.add_subcommand("ride-demo", "PoM over a live ridesharing market");
    auto* calibrate = app.add_subcommand("calibrate", "tune qc to a target convergence round");

    CLI11_PARSE(app, argc, argv);

    try {
        spec.epoch.total_rounds = rounds;
        spec.out = out;
        spec.sweep_input = sweep_input;
        if (ci) spec.epochs = pom::cli::kCiEpochs;
        if (!betas.empty()) spec.beta_grid = betas;

        const bool grid_command = sweep->parsed() || choose->parsed();
        if (grid_command) {
            if (!lambdas.empty()) spec.lambda_grid = lambdas;
            if (!lower_bounds.empty()) spec.lower_bound_grid = lower_bounds;
        } else {
            if (!lambdas.empty()) spec.epoch.lambda = single(lambdas, "lambda");
            if (!lower_bounds.empty())
                spec.epoch.capability_lower_bound = single(lower_bounds, "lower-bound");
        }
        // ride-demo keeps its own small defaults unless overridden
        if (app.count("--rounds")) ride.rounds = rounds;
        if (app.count("--matchers")) ride.matchers = spec.epoch.num_solvers;
        ride.pom = spec.epoch.pom_params();
        ride.seed = spec.epoch.seed;
        cal.epochs = app.count("--epochs") || ci ? spec.epochs : cal.epochs;

        std::vector<std::filesystem::path> written;
        if (simulate->parsed()) written = pom::cli::cmd_simulate(spec, std::cerr);
        else if (sweep->parsed()) written = pom::cli::cmd_sweep(spec, std::cerr);
        else if (choose->parsed()) written = pom::cli::cmd_choose_dcp(spec, std::cerr);
        else if (demo->parsed()) written = pom::cli::cmd_ride_demo(spec, std::cerr);
        else if (calibrate->parsed()) written = pom::cli::cmd_calibrate(spec, std::cerr);
        for (const auto& p : written) std::cout << p.string() << '\n';
    } catch (const pom::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const pom::cli::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
