#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pom/errors.hpp"
#include "pom/harness.hpp"
#include "pom/metrics.hpp"
#include "pom/random.hpp"

using namespace pom;

namespace {

RoundOutcome outcome(Round t, std::vector<double> tugs, std::uint32_t winner, std::uint32_t best) {
    RoundOutcome o;
    o.round = t;
    o.tug_by_solver = make_tug_table(std::move(tugs));
    o.winner = SolverId{winner};
    o.best = SolverId{best};
    return o;
}

} // namespace

TEST_CASE("gini examples") {
    CHECK(gini(std::vector<double>{5, 5, 5}) == 0.0);
    CHECK(gini(std::vector<double>{0, 0, 0, 9}) == doctest::Approx(0.75));
    CHECK(gini(std::vector<double>{3, 1}) == doctest::Approx(0.25));
    CHECK(gini_pairwise(std::vector<double>{3, 1}) == doctest::Approx(0.25));
    CHECK(gini(std::vector<double>{4}) == 0.0);
    CHECK_THROWS_AS(gini(std::vector<double>{0, 0}), DomainError);
    CHECK_THROWS_AS(gini(std::vector<double>{}), UsageError);
    CHECK_THROWS_AS(gini(std::vector<double>{1, -1}), UsageError);
}

TEST_CASE("sorted gini agrees with the pairwise oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 1000);
        std::vector<double> x(n);
        for (auto& v : x) v = static_cast<double>(uniform_index(rng, 50));
        if (std::accumulate(x.begin(), x.end(), 0.0) == 0.0) x[0] = 1.0;
        const double fast = gini(x);
        const double slow = gini_pairwise(x);
        CHECK(std::abs(fast - slow) <= 1e-12);
        CHECK(fast >= 0.0);
        CHECK(fast <= static_cast<double>(n - 1) / static_cast<double>(n) + 1e-12);

        std::vector<double> scaled = x;
        for (auto& v : scaled) v *= 7.5;
        CHECK(std::abs(gini(scaled) - fast) <= 1e-12);
    }
}

TEST_CASE("inefficiency") {
    std::vector<RoundOutcome> trace{
        outcome(1, {0.5, 0.9}, 0, 1),
        outcome(2, {0.8, 0.9}, 0, 1),
        outcome(3, {0.4, 0.7}, 0, 1),
    };
    CHECK(inefficiency(trace, 1, 3) == doctest::Approx(0.2));
    CHECK(inefficiency(trace, 0, 3) == doctest::Approx((0.4 + 0.1 + 0.3) / 3));
    std::vector<RoundOutcome> clean{outcome(1, {0.9, 0.5}, 0, 0), outcome(2, {0.9, 0.5}, 0, 0)};
    CHECK(inefficiency(clean, 0, 2) == 0.0);
    CHECK_THROWS_AS(inefficiency(trace, 3, 3), DomainError);
    CHECK_THROWS_AS(inefficiency(trace, 0, 5), UsageError);
}

TEST_CASE("equity") {
    CHECK(equity(std::vector<SolverId>{SolverId{4}}) == 1);
    std::vector<SolverId> all;
    for (std::uint32_t i = 0; i < 100; ++i) all.push_back(SolverId{i});
    CHECK(equity(all) == 100);
}

TEST_CASE("percentiles") {
    CHECK(distribution_percentile(0.98, 0.9) == doctest::Approx(0.8));
    CHECK(distribution_percentile(0.94, 0.7) == doctest::Approx(0.8));
    const std::vector<double> q{0.91, 0.75, 0.99, 0.75};
    const auto p = empirical_percentiles(q);
    CHECK(p[1] == 0.0);
    CHECK(p[3] == 0.0);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[2] == doctest::Approx(0.75));

    CHECK(PercentileWins::bin_of(0.0) == 0);
    CHECK(PercentileWins::bin_of(0.049) == 0);
    CHECK(PercentileWins::bin_of(0.05) == 1);
    CHECK(PercentileWins::bin_of(0.99) == 19);
    CHECK(PercentileWins::bin_of(1.0) == 19);

    std::map<SolverId, std::uint64_t> wins{{SolverId{0}, 6}, {SolverId{2}, 10}};
    const auto pw = percentile_wins(q, wins);
    const auto pts = pw.points();
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].percentile == 0.0);
    CHECK(pts[0].mean_wins == 0.0);   // both 0.75 solvers quit
    CHECK(pts[1].mean_wins == 6.0);
    CHECK(pts[2].mean_wins == 10.0);
    std::map<SolverId, std::uint64_t> stray{{SolverId{9}, 1}};
    CHECK_THROWS_AS(percentile_wins(q, stray), UsageError);
}

TEST_CASE("evaluate_epoch report invariants") {
    EpochConfig c;
    c.total_rounds = 400;
    c.num_solvers = 30;
    c.quit_checkpoint = 40;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        c.seed = seed;
        const auto e = run_epoch(c);
        REQUIRE(e.steady_state_round < e.total_rounds());
        const auto m = evaluate_epoch(e);
        CHECK(m.equity == e.survivor_ids.size());
        CHECK(m.win_counts.size() == m.equity);
        std::uint64_t total = 0;
        for (auto& [id, w] : m.win_counts) total += w;
        CHECK(total == e.total_rounds() - e.steady_state_round);
        CHECK(m.inefficiency >= 0.0);
        CHECK(m.gini >= 0.0);
        CHECK(m.gini < 1.0);
        CHECK(m.convergence_round == e.steady_state_round);
    }

    SUBCASE("lambda 0 with full acceptance: no inefficiency, one survivor") {
        c.lambda = 0.0;
        c.acceptance_rate = 1.0;
        const auto m = evaluate_epoch(run_epoch(c));
        CHECK(m.inefficiency == 0.0);
        CHECK(m.equity == 1);
    }
}

TEST_CASE("normalize_roc") {
    const std::vector<RocInput> in{{0.0, 0.01, 5.0}, {0.5, 0.02, 10.0}, {1.0, 0.03, 15.0}};
    const auto out = normalize_roc(in);
    REQUIRE(out.size() == 3);
    CHECK(out[0].inefficiency == 0.0);
    CHECK(out[0].equity == 0.0);
    CHECK(out[2].inefficiency == 1.0);
    CHECK(out[2].equity == 1.0);
    CHECK(out[1].inefficiency == doctest::Approx(0.5));
    CHECK(out[1].equity == doctest::Approx(0.5));

    const std::vector<RocInput> missing{{0.0, 0.01, 5.0}, {0.5, 0.02, 10.0}};
    CHECK_THROWS_AS(normalize_roc(missing), DomainError);
    const std::vector<RocInput> flat{{0.0, 0.01, 5.0}, {1.0, 0.01, 7.0}};
    CHECK_THROWS_AS(normalize_roc(flat), DomainError);
}

TEST_CASE("spearman") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    CHECK(spearman(x, std::vector<double>{2, 4, 6, 8, 10}) == doctest::Approx(1.0));
    CHECK(spearman(x, std::vector<double>{5, 4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman(x, std::vector<double>{1, 1, 2, 2, 3}) > 0.9);
    CHECK(std::isnan(spearman(x, std::vector<double>{3, 3, 3, 3, 3})));
    CHECK_THROWS_AS(spearman(x, std::vector<double>{1, 2}), UsageError);
}
