#include "pom/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pom/errors.hpp"

namespace pom {

double inefficiency(std::span<const RoundOutcome> outcomes, Round s, Round T) {
    if (T <= s) throw DomainError("no steady-state window: T must exceed s");
    if (outcomes.size() < T) throw UsageError("trace shorter than T rounds");
    double sum = 0.0;
    for (Round t = s + 1; t <= T; ++t) {
        const auto& o = outcomes[t - 1];
        sum += o.best_tug() - o.winner_tug();
    }
    return sum / static_cast<double>(T - s);
}

std::size_t equity(std::span<const SolverId> survivors) {
    return survivors.size();
}

namespace {

double checked_total(std::span<const double> counts) {
    if (counts.empty()) throw UsageError("gini needs at least one count");
    double total = 0.0;
    for (double c : counts) {
        if (c < 0.0) throw UsageError("gini counts must be nonnegative");
        total += c;
    }
    if (total == 0.0) throw DomainError("gini is undefined when every count is zero");
    return total;
}

} // namespace

double gini_pairwise(std::span<const double> counts) {
    const double total = checked_total(counts);
    const double n = static_cast<double>(counts.size());
    double diff = 0.0;
    for (double a : counts)
        for (double b : counts) diff += std::abs(a - b);
    return diff / (2.0 * n * total);   // 2 n^2 mean = 2 n total
}

double gini(std::span<const double> counts) {
    const double total = checked_total(counts);
    std::vector<double> x(counts.begin(), counts.end());
    std::sort(x.begin(), x.end());
    // sum_{i<j} (x_j - x_i) = sum_j x_j (2j - n + 1), j zero-based
    const double n = static_cast<double>(x.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        acc += x[j] * (2.0 * static_cast<double>(j) - n + 1.0);
    return acc / (n * total);
}

double distribution_percentile(double capability, double lower_bound) {
    if (!(lower_bound < 1.0)) throw DomainError("lower bound must be below 1");
    return (capability - lower_bound) / (1.0 - lower_bound);
}

std::vector<double> empirical_percentiles(std::span<const double> capabilities) {
    const std::size_t n = capabilities.size();
    std::vector<double> sorted(capabilities.begin(), capabilities.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> pct(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto lower = std::lower_bound(sorted.begin(), sorted.end(), capabilities[i]);
        pct[i] = static_cast<double>(lower - sorted.begin()) / static_cast<double>(n);
    }
    return pct;
}

std::size_t PercentileWins::bin_of(double percentile) {
    if (!(percentile >= 0.0)) return 0;
    auto b = static_cast<std::size_t>(std::floor(percentile / kBinWidth + 1e-9));
    return std::min(b, kBins - 1);
}

void PercentileWins::merge(const PercentileWins& other) {
    for (std::size_t b = 0; b < kBins; ++b) {
        total_wins[b] += other.total_wins[b];
        solver_count[b] += other.solver_count[b];
    }
}

std::vector<PercentileWins::Point> PercentileWins::points() const {
    std::vector<Point> out;
    for (std::size_t b = 0; b < kBins; ++b) {
        if (solver_count[b] == 0) continue;
        out.push_back({static_cast<double>(b) * kBinWidth,
                       total_wins[b] / static_cast<double>(solver_count[b])});
    }
    return out;
}

PercentileWins percentile_wins(std::span<const double> capabilities,
                               const std::map<SolverId, std::uint64_t>& win_counts) {
    for (const auto& [id, wins] : win_counts)
        if (id.value >= capabilities.size())
            throw UsageError("win count for unknown solver " + std::to_string(id.value));
    PercentileWins result;
    const auto pct = empirical_percentiles(capabilities);
    for (std::size_t i = 0; i < capabilities.size(); ++i) {
        auto it = win_counts.find(SolverId{static_cast<std::uint32_t>(i)});
        const double wins = it == win_counts.end() ? 0.0 : static_cast<double>(it->second);
        const std::size_t b = PercentileWins::bin_of(pct[i]);
        result.total_wins[b] += wins;
        result.solver_count[b] += 1;
    }
    return result;
}

MetricsReport evaluate_epoch(const EpochResult& epoch) {
    const Round T = epoch.total_rounds();
    const Round s = epoch.steady_state_round;

    MetricsReport report;
    report.inefficiency = inefficiency(epoch.outcomes, s, T);
    report.equity = equity(epoch.survivor_ids);
    report.convergence_round = s;

    for (SolverId id : epoch.survivor_ids) report.win_counts[id] = 0;
    std::vector<double> all_wins(epoch.capabilities.size(), 0.0);
    for (Round t = s + 1; t <= T; ++t) {
        const SolverId w = epoch.outcomes[t - 1].winner;
        auto it = report.win_counts.find(w);
        if (it == report.win_counts.end())
            throw UsageError("steady-state winner is not a survivor");
        ++it->second;
        all_wins[w.value] += 1.0;
    }
    report.gini = gini(all_wins);
    report.percentile_wins = percentile_wins(epoch.capabilities, report.win_counts);

    if (!epoch.capabilities.empty()) {
        auto top = std::max_element(epoch.capabilities.begin(), epoch.capabilities.end());
        report.top_capability_wins =
            static_cast<std::uint64_t>(all_wins[static_cast<std::size_t>(top - epoch.capabilities.begin())]);
    }
    return report;
}

std::vector<RocPoint> normalize_roc(std::span<const RocInput> points) {
    const RocInput* lo = nullptr;
    const RocInput* hi = nullptr;
    for (const auto& p : points) {
        if (std::abs(p.lambda) < 1e-9) lo = &p;
        if (std::abs(p.lambda - 1.0) < 1e-9) hi = &p;
    }
    if (lo == nullptr || hi == nullptr)
        throw DomainError("ROC normalization needs points at lambda = 0 and lambda = 1");
    const double ine_span = hi->mean_inefficiency - lo->mean_inefficiency;
    const double equ_span = hi->mean_equity - lo->mean_equity;
    if (ine_span == 0.0 || equ_span == 0.0)
        throw DomainError("ROC endpoints coincide; normalization undefined");

    std::vector<RocPoint> out;
    out.reserve(points.size());
    for (const auto& p : points)
        out.push_back({p.lambda, (p.mean_inefficiency - lo->mean_inefficiency) / ine_span,
                       (p.mean_equity - lo->mean_equity) / equ_span});
    return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw UsageError("spearman needs two equal-length series of length >= 2");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

} // namespace pom
