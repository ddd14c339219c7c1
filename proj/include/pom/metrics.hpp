#pragma once

// Steady-state performance measures of a PoM epoch.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pom/core.hpp"
#include "pom/epoch.hpp"

namespace pom {

// Mean TUG gap between the best solver and the winner over rounds s+1..T.
// `outcomes` is the full trace; round t lives at index t-1.
double inefficiency(std::span<const RoundOutcome> outcomes, Round s, Round T);

std::size_t equity(std::span<const SolverId> survivors);

// Mean-normalized pairwise-difference Gini, O(n^2). Reference form.
double gini_pairwise(std::span<const double> counts);

// Sorted O(n log n) form of the same statistic.
double gini(std::span<const double> counts);

// (q - L) / (1 - L): where q sits in the support of U(L, 1).
double distribution_percentile(double capability, double lower_bound);

// Fraction of solvers whose capability is strictly lower than solver i's.
std::vector<double> empirical_percentiles(std::span<const double> capabilities);

// Win totals bucketed by capability percentile, width 0.05. Bins from
// different epochs can be merged before taking means.
struct PercentileWins {
    static constexpr std::size_t kBins = 20;
    static constexpr double kBinWidth = 1.0 / kBins;

    std::array<double, kBins> total_wins{};
    std::array<std::uint64_t, kBins> solver_count{};

    static std::size_t bin_of(double percentile);
    void merge(const PercentileWins& other);

    struct Point {
        double percentile;   // bin lower edge
        double mean_wins;
    };
    // Non-empty bins, ascending.
    std::vector<Point> points() const;
};

// win_counts covers survivors; solvers absent from it count as zero wins.
PercentileWins percentile_wins(std::span<const double> capabilities,
                               const std::map<SolverId, std::uint64_t>& win_counts);

struct MetricsReport {
    double inefficiency = 0.0;
    std::size_t equity = 0;
    double gini = 0.0;                            // over all initial solvers
    Round convergence_round = 0;
    std::map<SolverId, std::uint64_t> win_counts; // steady-state wins per survivor
    PercentileWins percentile_wins;
    std::uint64_t top_capability_wins = 0;        // wins of the most capable solver
};

// Requires T > s.
MetricsReport evaluate_epoch(const EpochResult& epoch);

struct RocInput {
    double lambda;
    double mean_inefficiency;
    double mean_equity;
};

struct RocPoint {
    double lambda;
    double inefficiency;   // 0 at lambda = 0, 1 at lambda = 1
    double equity;         // 0 at lambda = 0, 1 at lambda = 1
};

std::vector<RocPoint> normalize_roc(std::span<const RocInput> points);

// Spearman rank correlation with average ranks for ties. NaN when either
// series is constant.
double spearman(std::span<const double> x, std::span<const double> y);

} // namespace pom
