#include "pom/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <fstream>
#include <ostream>
#include <string>

#include "pom/cli/csv.hpp"
#include "pom/errors.hpp"
#include "pom/ledger.hpp"
#include "pom/metrics.hpp"

namespace pom::cli {

namespace fs = std::filesystem;

void ExperimentSpec::validate() const {
    epoch.validate();
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    if (lambda_grid.empty() || lower_bound_grid.empty() || beta_grid.empty())
        throw ConfigError("grids must be nonempty");
    for (double l : lambda_grid)
        if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("lambda grid values must lie in [0, 1]");
    for (double L : lower_bound_grid)
        if (!(L > 0.0 && L < 1.0)) throw ConfigError("lower bounds must lie in (0, 1)");
    for (double b : beta_grid) DesignerPreferences{b, equ_min, ine_max}.validate();
}

namespace {

std::string num(double v) { return format_number(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

fs::path prepare_out(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
    return out;
}

ExperimentOptions experiment_options(const ExperimentSpec& spec) {
    ExperimentOptions o;
    o.threads = spec.threads;
    o.keep_traces = false;
    return o;
}

const std::vector<std::string> kSweepHeader = {
    "lower_bound", "lambda", "mean_inefficiency", "std_inefficiency", "mean_equity",
    "std_equity", "mean_convergence", "std_convergence", "mean_gini", "std_gini",
    "mean_top_wins", "converged_epochs", "non_converged_epochs"};

void write_sweep(const fs::path& path, const std::vector<SweepRow>& rows) {
    CsvWriter csv(path, kSweepHeader);
    for (const auto& r : rows) {
        const auto& a = r.aggregate;
        const bool empty = a.converged_epochs == 0;
        const double nan = std::nan("");
        csv.row({num(r.lower_bound), num(r.lambda),
                 num(empty ? nan : a.inefficiency.mean), num(empty ? nan : a.inefficiency.std),
                 num(empty ? nan : a.equity.mean), num(empty ? nan : a.equity.std),
                 num(empty ? nan : a.convergence_round.mean),
                 num(empty ? nan : a.convergence_round.std), num(empty ? nan : a.gini.mean),
                 num(empty ? nan : a.gini.std), num(empty ? nan : a.top_capability_wins.mean),
                 num(static_cast<std::uint64_t>(a.converged_epochs)),
                 num(static_cast<std::uint64_t>(a.non_converged_epochs))});
    }
}

void warn_non_converged(std::ostream& log, const std::string& where, std::size_t count) {
    if (count > 0)
        log << "warning: " << where << ": " << count << " epoch(s) did not converge\n";
}

std::vector<SweepRow> compute_sweep(const ExperimentSpec& spec, std::ostream& log) {
    log << "sweeping " << spec.lower_bound_grid.size() << " x " << spec.lambda_grid.size()
        << " cells, " << spec.epochs << " epochs each\n";
    auto rows = run_sweep(spec.epoch, spec.lower_bound_grid, spec.lambda_grid, spec.epochs,
                          experiment_options(spec));
    for (const auto& r : rows)
        warn_non_converged(log, "L=" + num(r.lower_bound) + " lambda=" + num(r.lambda),
                           r.aggregate.non_converged_epochs);
    return rows;
}

std::vector<std::pair<double, std::vector<SweepPoint>>>
group_by_lower_bound(const std::vector<SweepRow>& rows) {
    std::vector<std::pair<double, std::vector<SweepPoint>>> groups;
    for (const auto& r : rows) {
        if (r.aggregate.converged_epochs == 0) continue;
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == r.lower_bound; });
        if (it == groups.end()) {
            groups.push_back({r.lower_bound, {}});
            it = std::prev(groups.end());
        }
        it->second.push_back(
            {r.lambda, r.aggregate.equity.mean, r.aggregate.inefficiency.mean, false});
    }
    return groups;
}

} // namespace

std::vector<fs::path> cmd_simulate(const ExperimentSpec& spec, std::ostream& log) {
    spec.validate();
    const fs::path out = prepare_out(spec.out);
    log << "simulating " << spec.epochs << " epochs (L=" << num(spec.epoch.capability_lower_bound)
        << ", lambda=" << num(spec.epoch.lambda) << ", qc=" << spec.epoch.quit_checkpoint
        << ")\n";
    const auto result = run_experiment(spec.epoch, spec.epochs, experiment_options(spec));

    const fs::path epochs_path = out / "epochs.csv";
    {
        CsvWriter csv(epochs_path,
                      {"epoch", "s", "converged", "equity", "inefficiency", "gini"});
        for (const auto& r : result.records) {
            const bool has = r.metrics.has_value();
            csv.row({num(std::uint64_t{r.epoch}), num(std::uint64_t{r.steady_state_round}),
                     r.converged ? "1" : "0",
                     has ? num(static_cast<std::uint64_t>(r.metrics->equity)) : "nan",
                     has ? num(r.metrics->inefficiency) : "nan",
                     has ? num(r.metrics->gini) : "nan"});
        }
    }

    const auto& a = result.aggregate;
    const auto& c = spec.epoch;
    const fs::path summary_path = out / "summary.csv";
    {
        CsvWriter csv(summary_path,
                      {"lower_bound", "lambda", "alpha", "qc", "rounds", "matchers", "epochs",
                       "converged_epochs", "non_converged_epochs", "mean_inefficiency",
                       "std_inefficiency", "mean_equity", "std_equity", "mean_gini", "std_gini",
                       "mean_convergence", "std_convergence"});
        csv.row({num(c.capability_lower_bound), num(c.lambda), num(c.acceptance_rate),
                 num(std::uint64_t{c.quit_checkpoint}), num(std::uint64_t{c.total_rounds}),
                 num(std::uint64_t{c.num_solvers}), num(std::uint64_t{spec.epochs}),
                 num(static_cast<std::uint64_t>(a.converged_epochs)),
                 num(static_cast<std::uint64_t>(a.non_converged_epochs)),
                 num(a.inefficiency.mean), num(a.inefficiency.std), num(a.equity.mean),
                 num(a.equity.std), num(a.gini.mean), num(a.gini.std),
                 num(a.convergence_round.mean), num(a.convergence_round.std)});
    }

    const fs::path pct_path = out / "percentile_wins.csv";
    {
        CsvWriter csv(pct_path, {"percentile", "mean_wins"});
        for (const auto& p : a.percentile_wins.points())
            csv.row({num(p.percentile), num(p.mean_wins)});
    }
    warn_non_converged(log, "simulate", a.non_converged_epochs);
    return {epochs_path, summary_path, pct_path};
}

std::vector<fs::path> cmd_sweep(const ExperimentSpec& spec, std::ostream& log) {
    spec.validate();
    const fs::path out = prepare_out(spec.out);
    const auto rows = compute_sweep(spec, log);

    const fs::path sweep_path = out / "sweep.csv";
    write_sweep(sweep_path, rows);

    const fs::path roc_path = out / "roc.csv";
    CsvWriter csv(roc_path, {"lower_bound", "lambda", "inefficiency_norm", "equity_norm"});
    for (const auto& [L, points] : group_by_lower_bound(rows)) {
        std::vector<RocInput> in;
        for (const auto& p : points) in.push_back({p.lambda, p.mean_inefficiency, p.mean_equity});
        try {
            for (const auto& r : normalize_roc(in))
                csv.row({num(L), num(r.lambda), num(r.inefficiency), num(r.equity)});
        } catch (const DomainError& e) {
            log << "warning: no ROC for L=" << num(L) << ": " << e.what() << '\n';
        }
    }
    return {sweep_path, roc_path};
}

std::vector<std::pair<double, std::vector<SweepPoint>>>
load_sweep_points(const fs::path& sweep_csv) {
    std::vector<std::pair<double, std::vector<SweepPoint>>> groups;
    for (const auto& row : read_csv(sweep_csv)) {
        auto field = [&](const char* name) {
            auto it = row.find(name);
            if (it == row.end()) throw IoError(sweep_csv.string() + ": missing column " + name);
            return std::stod(it->second);
        };
        const double L = field("lower_bound");
        const double equ = field("mean_equity");
        const double ine = field("mean_inefficiency");
        if (std::isnan(equ) || std::isnan(ine)) continue;
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == L; });
        if (it == groups.end()) {
            groups.push_back({L, {}});
            it = std::prev(groups.end());
        }
        it->second.push_back({field("lambda"), equ, ine, false});
    }
    return groups;
}

std::vector<fs::path> cmd_choose_dcp(const ExperimentSpec& spec, std::ostream& log) {
    spec.validate();
    const fs::path out = prepare_out(spec.out);
    std::vector<fs::path> written;

    std::vector<std::pair<double, std::vector<SweepPoint>>> groups;
    if (!spec.sweep_input.empty()) {
        groups = load_sweep_points(spec.sweep_input);
    } else {
        const auto rows = compute_sweep(spec, log);
        const fs::path sweep_path = out / "sweep.csv";
        write_sweep(sweep_path, rows);
        written.push_back(sweep_path);
        groups = group_by_lower_bound(rows);
    }

    const fs::path choice_path = out / "choice.csv";
    CsvWriter csv(choice_path, {"lower_bound", "beta", "lambda_star", "objective",
                                "feasible_lambdas"});
    for (const auto& [L, points] : groups) {
        for (double beta : spec.beta_grid) {
            const DesignerPreferences prefs{beta, spec.equ_min, spec.ine_max};
            DcpChoice choice;
            try {
                choice = choose_dcp(points, prefs);
            } catch (const DomainError& e) {
                log << "warning: L=" << num(L) << ": " << e.what() << '\n';
                csv.row({num(L), num(beta), "undefined", "nan", ""});
                continue;
            }
            std::string feasible;
            for (double l : choice.feasible_lambdas) {
                if (!feasible.empty()) feasible += ';';
                feasible += num(l);
            }
            if (choice.feasible())
                csv.row({num(L), num(beta), num(*choice.lambda), num(choice.objective), feasible});
            else
                csv.row({num(L), num(beta), "infeasible", "nan", feasible});
        }
    }
    written.push_back(choice_path);
    return written;
}

std::vector<fs::path> cmd_ride_demo(const ExperimentSpec& spec, std::ostream& log) {
    spec.ride.validate();
    const fs::path out = prepare_out(spec.out);
    log << "ride demo: " << spec.ride.matchers << " matchers, " << spec.ride.rounds
        << " rounds\n";
    const auto result = ride::run_ride_demo(spec.ride);

    const fs::path rounds_path = out / "rounds.csv";
    {
        CsvWriter csv(rounds_path,
                      {"round", "riders", "drivers", "matched", "accepted", "alpha", "winner",
                       "best", "winner_tug", "best_tug", "active_matchers", "block_valid",
                       "block_hash"});
        for (const auto& r : result.rounds)
            csv.row({num(std::uint64_t{r.round}), num(static_cast<std::uint64_t>(r.riders)),
                     num(static_cast<std::uint64_t>(r.drivers)),
                     num(static_cast<std::uint64_t>(r.matched)),
                     num(static_cast<std::uint64_t>(r.accepted)), num(r.acceptance_rate),
                     num(std::uint64_t{r.winner.value}), num(std::uint64_t{r.best.value}),
                     num(r.winner_tug), num(r.best_tug),
                     num(static_cast<std::uint64_t>(r.active_matchers)),
                     r.block_validated ? "1" : "0", r.block_hash});
    }

    const fs::path matchers_path = out / "matchers.csv";
    {
        std::vector<std::uint64_t> wins(result.skills.size(), 0);
        for (const auto& o : result.outcomes) ++wins[o.winner.value];
        std::vector<bool> active(result.skills.size(), true);
        for (const auto& o : result.outcomes)
            for (auto id : o.quit_ids) active[id.value] = false;
        CsvWriter csv(matchers_path, {"matcher", "skill", "wins", "active"});
        for (std::size_t k = 0; k < result.skills.size(); ++k)
            csv.row({num(static_cast<std::uint64_t>(k)), num(result.skills[k]), num(wins[k]),
                     active[k] ? "1" : "0"});
    }

    const fs::path chain_path = out / "chain.log";
    {
        std::ofstream f(chain_path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + chain_path.string() + " for writing");
        ledger::export_chain(f, result.chain);
        if (!f) throw IoError("write failed for " + chain_path.string());
    }

    std::ifstream back(chain_path, std::ios::binary);
    const auto reloaded = ledger::import_chain(back);
    if (auto bad = ledger::verify_chain(reloaded))
        throw ExperimentError("exported chain fails verification at height " +
                              std::to_string(*bad));
    log << "chain of " << reloaded.size() << " blocks verified\n";
    return {rounds_path, matchers_path, chain_path};
}

std::vector<fs::path> cmd_calibrate(const ExperimentSpec& spec, std::ostream& log) {
    spec.validate();
    const fs::path out = prepare_out(spec.out);
    const auto& o = spec.calibration;
    log << "calibrating qc in [" << o.qc_min << ", " << o.qc_max << "] toward mean s = "
        << num(o.target_convergence) << " over " << o.epochs << " epochs\n";
    ExperimentOptions opts;
    opts.threads = spec.threads;
    const auto cal = calibrate_qc(spec.epoch, o, opts);

    const fs::path path = out / "calibration.csv";
    CsvWriter csv(path, {"qc", "mean_convergence", "converged_epochs"});
    for (const auto& p : cal.scanned)
        csv.row({num(std::uint64_t{p.qc}), num(p.mean_convergence),
                 num(static_cast<std::uint64_t>(p.converged_epochs))});
    log << "calibrated qc = " << cal.qc << " (mean s = " << num(cal.mean_convergence) << ")\n";
    return {path};
}

} // namespace pom::cli
