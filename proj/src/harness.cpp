#include "pom/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "pom/errors.hpp"

namespace pom {

void EpochConfig::validate() const {
    if (total_rounds < 1) throw ConfigError("total_rounds must be at least 1");
    if (num_solvers < 1) throw ConfigError("num_solvers must be at least 1");
    if (!(capability_lower_bound > 0.0 && capability_lower_bound < 1.0))
        throw ConfigError("capability lower bound must lie in (0, 1), got " +
                          std::to_string(capability_lower_bound));
    if (!(acceptance_rate >= 0.0 && acceptance_rate <= 1.0))
        throw ConfigError("acceptance rate must lie in [0, 1]");
    pom_params().validate();
}

std::vector<double> sample_capabilities(std::uint32_t num_solvers, double lower_bound,
                                        Rng& rng) {
    if (!(lower_bound > 0.0 && lower_bound < 1.0))
        throw ConfigError("capability lower bound must lie in (0, 1), got " +
                          std::to_string(lower_bound));
    std::vector<double> q(num_solvers);
    for (auto& v : q) v = uniform(rng, lower_bound, 1.0);
    return q;
}

SteadyState detect_steady_state(std::span<const RoundOutcome> outcomes, Round min_tail) {
    if (outcomes.empty()) throw UsageError("steady-state detection needs a nonempty trace");
    SteadyState ss;
    for (const auto& o : outcomes)
        if (!o.quit_ids.empty()) ss.round = o.round;
    const auto T = static_cast<Round>(outcomes.size());
    ss.converged = T - ss.round >= min_tail;
    return ss;
}

EpochResult run_epoch(const EpochConfig& config, Round min_tail) {
    config.validate();
    Rng rng(config.seed);

    EpochResult result;
    result.capabilities = sample_capabilities(config.num_solvers,
                                              config.capability_lower_bound, rng);
    const TugTable tugs = make_tug_table(result.capabilities);

    Consensus consensus(config.num_solvers, config.pom_params());
    for (Round t = 1; t <= config.total_rounds; ++t) {
        consensus.step(tugs);
        consensus.record_acceptance(config.acceptance_rate);
    }
    result.survivor_ids = consensus.active_ids();
    result.outcomes = consensus.take_outcomes();

    const auto ss = detect_steady_state(result.outcomes, min_tail);
    result.steady_state_round = ss.round;
    result.converged = ss.converged;
    return result;
}

MeanStd mean_std(std::span<const double> values) {
    MeanStd m;
    m.n = values.size();
    if (m.n == 0) return m;
    m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(m.n);
    if (m.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        m.std = std::sqrt(ss / static_cast<double>(m.n - 1));
    }
    return m;
}

std::uint64_t epoch_seed(std::uint64_t master_seed, std::uint32_t epoch_index) {
    return derive_seed(master_seed, epoch_index);
}

Aggregate aggregate_records(std::span<const EpochRecord> records) {
    Aggregate agg;
    std::vector<double> ine, equ, gin, conv, top;
    for (const auto& r : records) {
        if (!r.converged || !r.metrics) {
            ++agg.non_converged_epochs;
            continue;
        }
        ++agg.converged_epochs;
        const auto& m = *r.metrics;
        ine.push_back(m.inefficiency);
        equ.push_back(static_cast<double>(m.equity));
        gin.push_back(m.gini);
        conv.push_back(static_cast<double>(m.convergence_round));
        top.push_back(static_cast<double>(m.top_capability_wins));
        agg.percentile_wins.merge(m.percentile_wins);
    }
    agg.inefficiency = mean_std(ine);
    agg.equity = mean_std(equ);
    agg.gini = mean_std(gin);
    agg.convergence_round = mean_std(conv);
    agg.top_capability_wins = mean_std(top);
    return agg;
}

namespace {

// Runs fn(i) for i in [0, n) on a small pool; results are written by index
// so completion order never matters.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

ExperimentResult run_experiment_unchecked(const EpochConfig& config, std::uint32_t epochs,
                                          const ExperimentOptions& options) {
    config.validate();
    if (epochs < 1) throw ConfigError("epochs must be at least 1");

    ExperimentResult result;
    result.config = config;
    result.records.resize(epochs);
    if (options.keep_traces) result.epochs.resize(epochs);

    parallel_for(epochs, options.threads, [&](std::size_t i) {
        EpochConfig cfg = config;
        cfg.seed = epoch_seed(config.seed, static_cast<std::uint32_t>(i));
        EpochResult epoch = run_epoch(cfg, options.min_tail);

        EpochRecord& rec = result.records[i];
        rec.epoch = static_cast<std::uint32_t>(i);
        rec.steady_state_round = epoch.steady_state_round;
        rec.converged = epoch.converged;
        if (epoch.steady_state_round < epoch.total_rounds())
            rec.metrics = evaluate_epoch(epoch);
        if (options.keep_traces) result.epochs[i] = std::move(epoch);
    });

    result.aggregate = aggregate_records(result.records);
    return result;
}

} // namespace

ExperimentResult run_experiment(const EpochConfig& config, std::uint32_t epochs,
                                const ExperimentOptions& options) {
    auto result = run_experiment_unchecked(config, epochs, options);
    if (result.aggregate.converged_epochs == 0)
        throw ExperimentError(
            "no epoch converged (" + std::to_string(epochs) + " epochs, T=" +
            std::to_string(config.total_rounds) + ", qc=" +
            std::to_string(config.quit_checkpoint) + ", min_tail=" +
            std::to_string(options.min_tail) + "); raise total_rounds or lower qc");
    return result;
}

std::vector<SweepRow> run_sweep(const EpochConfig& base, std::span<const double> lower_bounds,
                                std::span<const double> lambdas, std::uint32_t epochs,
                                const ExperimentOptions& options) {
    if (lower_bounds.empty() || lambdas.empty())
        throw ConfigError("sweep grids must be nonempty");
    ExperimentOptions opts = options;
    opts.keep_traces = false;

    std::vector<SweepRow> rows;
    rows.reserve(lower_bounds.size() * lambdas.size());
    for (double L : lower_bounds) {
        for (double lambda : lambdas) {
            EpochConfig cfg = base;
            cfg.capability_lower_bound = L;
            cfg.lambda = lambda;
            auto exp = run_experiment_unchecked(cfg, epochs, opts);
            rows.push_back({L, lambda, exp.aggregate});
        }
    }
    return rows;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
    return g;
}

std::vector<double> default_lower_bound_grid() {
    return {0.9, 0.7, 0.5, 0.3};
}

namespace {

CalibrationPoint evaluate_qc(const EpochConfig& base, Round qc, std::uint32_t epochs,
                             const ExperimentOptions& experiment) {
    EpochConfig cfg = base;
    cfg.quit_checkpoint = qc;
    ExperimentOptions opts = experiment;
    opts.keep_traces = false;
    auto exp = run_experiment_unchecked(cfg, epochs, opts);
    return {qc, exp.aggregate.convergence_round.mean, exp.aggregate.converged_epochs};
}

} // namespace

Calibration calibrate_qc(const EpochConfig& base, const CalibrationOptions& options,
                         const ExperimentOptions& experiment) {
    if (options.qc_min < 1 || options.qc_max < options.qc_min)
        throw ConfigError("calibration qc range is empty");
    if (options.coarse_step < 1 || options.fine_step < 1)
        throw ConfigError("calibration steps must be positive");

    Calibration cal;
    auto consider = [&](Round qc) {
        for (const auto& p : cal.scanned)
            if (p.qc == qc) return;
        cal.scanned.push_back(evaluate_qc(base, qc, options.epochs, experiment));
    };
    auto closest = [&]() -> const CalibrationPoint* {
        const CalibrationPoint* best = nullptr;
        double best_gap = std::numeric_limits<double>::infinity();
        for (const auto& p : cal.scanned) {
            if (p.converged_epochs == 0) continue;
            const double gap = std::abs(p.mean_convergence - options.target_convergence);
            if (gap < best_gap || (gap == best_gap && p.qc < best->qc)) {
                best = &p;
                best_gap = gap;
            }
        }
        return best;
    };

    for (Round qc = options.qc_min; qc <= options.qc_max; qc += options.coarse_step)
        consider(qc);
    const CalibrationPoint* coarse = closest();
    if (coarse == nullptr) throw ExperimentError("calibration: no qc in range converged");

    const Round centre = coarse->qc;
    const Round lo = centre > options.qc_min + options.coarse_step
                         ? centre - options.coarse_step : options.qc_min;
    const Round hi = std::min(options.qc_max, centre + options.coarse_step);
    for (Round qc = lo; qc <= hi; qc += options.fine_step) consider(qc);

    std::sort(cal.scanned.begin(), cal.scanned.end(),
              [](const auto& a, const auto& b) { return a.qc < b.qc; });
    const CalibrationPoint* best = closest();
    cal.qc = best->qc;
    cal.mean_convergence = best->mean_convergence;
    return cal;
}

} // namespace pom
