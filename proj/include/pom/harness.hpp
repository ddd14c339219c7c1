#pragma once

// Agent-based experiment harness for the abstract solver model, in which
// every solver's TUG equals its fixed capability q_k ~ U(L, 1).
//
// Seeding: epoch i of an experiment with master seed m draws from
// mt19937_64(derive_seed(m, i)), so an epoch's trace never depends on how
// many epochs were requested or on execution order.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pom/epoch.hpp"
#include "pom/metrics.hpp"
#include "pom/random.hpp"

namespace pom {

inline constexpr Round kDefaultMinTail = 100;

// Draws are consumed in ascending solver-id order.
std::vector<double> sample_capabilities(std::uint32_t num_solvers, double lower_bound,
                                        Rng& rng);

EpochResult run_epoch(const EpochConfig& config, Round min_tail = kDefaultMinTail);

struct SteadyState {
    Round round = 0;
    bool converged = true;
};

SteadyState detect_steady_state(std::span<const RoundOutcome> outcomes,
                                Round min_tail = kDefaultMinTail);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;   // sample standard deviation, 0 for a single value
    std::size_t n = 0;
};

MeanStd mean_std(std::span<const double> values);

struct EpochRecord {
    std::uint32_t epoch = 0;
    Round steady_state_round = 0;
    bool converged = false;
    std::optional<MetricsReport> metrics;   // present when T > s
};

struct Aggregate {
    MeanStd inefficiency;
    MeanStd equity;
    MeanStd gini;
    MeanStd convergence_round;
    MeanStd top_capability_wins;
    PercentileWins percentile_wins;
    std::size_t converged_epochs = 0;
    std::size_t non_converged_epochs = 0;
};

struct ExperimentOptions {
    Round min_tail = kDefaultMinTail;
    unsigned threads = 0;        // 0 = hardware concurrency
    bool keep_traces = true;     // keep full EpochResults
};

struct ExperimentResult {
    EpochConfig config;
    std::vector<EpochResult> epochs;   // empty unless keep_traces
    std::vector<EpochRecord> records;  // one per epoch, by index
    Aggregate aggregate;               // converged epochs only
};

std::uint64_t epoch_seed(std::uint64_t master_seed, std::uint32_t epoch_index);

// Throws ExperimentError when no epoch converges.
ExperimentResult run_experiment(const EpochConfig& config, std::uint32_t epochs,
                                const ExperimentOptions& options = {});

// Aggregation over records; converged records only.
Aggregate aggregate_records(std::span<const EpochRecord> records);

struct SweepRow {
    double lower_bound = 0.0;
    double lambda = 0.0;
    Aggregate aggregate;
};

// One experiment per (L, lambda) cell, ordered by L then lambda. Every cell
// reuses base.seed, so cells with the same L see the same capability draws.
// Cells without converged epochs are reported with an empty aggregate.
std::vector<SweepRow> run_sweep(const EpochConfig& base, std::span<const double> lower_bounds,
                                std::span<const double> lambdas, std::uint32_t epochs,
                                const ExperimentOptions& options = {});

std::vector<double> default_lambda_grid();       // 0.0, 0.1, ..., 1.0
std::vector<double> default_lower_bound_grid();  // 0.9, 0.7, 0.5, 0.3

struct CalibrationPoint {
    Round qc = 0;
    double mean_convergence = 0.0;
    std::size_t converged_epochs = 0;
};

struct Calibration {
    Round qc = 0;                          // point closest to the target
    double mean_convergence = 0.0;
    std::vector<CalibrationPoint> scanned; // ascending qc
};

struct CalibrationOptions {
    double target_convergence = 1200.0;
    Round qc_min = 50;
    Round qc_max = 1400;
    Round coarse_step = 50;
    Round fine_step = 5;
    std::uint32_t epochs = 200;
};

// Coarse grid over [qc_min, qc_max], then a fine grid around the best coarse
// point. Mean convergence is taken over converged epochs.
Calibration calibrate_qc(const EpochConfig& base, const CalibrationOptions& options = {},
                         const ExperimentOptions& experiment = {});

} // namespace pom
