#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pom/assignment.hpp"
#include "pom/errors.hpp"
#include "pom/rideshare.hpp"

using namespace pom;
using namespace pom::ride;

namespace {

MatchingInstance from_matrix(std::size_t r, std::size_t d, std::vector<double> u) {
    MatchingInstance inst;
    for (std::size_t i = 0; i < r; ++i) inst.riders.push_back(Rider{i, {}, {}, 0.0});
    for (std::size_t j = 0; j < d; ++j) inst.drivers.push_back(Driver{j, {}});
    inst.utilities = std::move(u);
    inst.next_rider_id = r;
    inst.next_driver_id = d;
    return inst;
}

// Exhaustive maximum over all injective rider -> driver maps of size min(r, d).
double brute_force_optimum(const MatchingInstance& inst) {
    const std::size_t r = inst.num_riders(), d = inst.num_drivers();
    const std::size_t big = std::max(r, d);
    std::vector<std::size_t> perm(big);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < r; ++i)
            if (perm[i] < d) total += inst.utility(i, perm[i]);
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

} // namespace

TEST_CASE("utility") {
    CHECK(utility(Rider{0, {0.3, 0.3}, {}, 0}, Driver{0, {0.3, 0.3}}) == 1.0);
    CHECK(utility(Rider{0, {0.0, 0.0}, {}, 0}, Driver{0, {1.0, 0.0}}) == doctest::Approx(0.5));
    CHECK(utility(Rider{0, {0.0, 0.0}, {}, 0}, Driver{0, {0.2, 0.0}}) >
          utility(Rider{0, {0.0, 0.0}, {}, 0}, Driver{0, {0.3, 0.0}}));
}

TEST_CASE("build_instance") {
    Rng rng(1);
    auto empty = build_instance(0, 5, rng);
    CHECK(empty.num_riders() == 0);
    CHECK(empty.utilities.empty());
    auto sq = build_instance(3, 3, rng);
    CHECK(sq.utilities.size() == 9);
    for (double u : sq.utilities) CHECK((u > 0.0 && u <= 1.0));
    for (const auto& r : sq.riders) {
        CHECK((r.location.x >= 0.0 && r.location.x < 1.0));
        CHECK((r.acceptance_threshold >= 0.0 && r.acceptance_threshold < 0.5));
    }
    Rng a(7), b(7);
    const auto x = build_instance(4, 6, a);
    const auto y = build_instance(4, 6, b);
    CHECK(x.utilities == y.utilities);
}

TEST_CASE("optimal matching on the 2x2 example") {
    const auto inst = from_matrix(2, 2, {0.9, 0.1, 0.2, 0.8});
    const auto s = optimal_match(inst);
    REQUIRE(s.pairs.size() == 2);
    CHECK(s.pairs[0] == Assignment{0, 0});
    CHECK(s.pairs[1] == Assignment{1, 1});
    CHECK(total_utility(inst, s) == doctest::Approx(1.7));
    Rng rng(3);
    const auto one = from_matrix(1, 1, {0.4});
    for (double skill : {0.0, 0.5, 1.0})
        CHECK(heuristic_match(one, skill, rng).pairs == std::vector<Assignment>{{0, 0}});
}

TEST_CASE("optimal matching equals the brute-force maximum") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t r = uniform_index(rng, 7);
        const std::size_t d = uniform_index(rng, 7);
        const auto inst = build_instance(r, d, rng);
        const auto s = optimal_match(inst);
        CHECK(is_valid_solution(inst, s));
        CHECK(s.pairs.size() == std::min(r, d));
        CHECK(std::abs(total_utility(inst, s) - brute_force_optimum(inst)) <= 1e-12);
    }
}

TEST_CASE("max_weight_assignment handles rectangular inputs") {
    const std::vector<double> w{1, 5, 2, 4, 3, 9};   // 2 x 3
    const auto rows = max_weight_assignment(w, 2, 3);
    CHECK(rows == std::vector<std::size_t>{1, 2});
    const auto tall = max_weight_assignment(w, 3, 2);   // 3 x 2: {1,5},{2,4},{3,9}
    CHECK(tall == std::vector<std::size_t>{kUnassigned, 0, 1});   // 2 + 9
    CHECK(max_weight_assignment({}, 0, 4).empty());
}

TEST_CASE("heuristics produce valid matchings and skill helps") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t r = 1 + uniform_index(rng, 12);
        const std::size_t d = 1 + uniform_index(rng, 12);
        const auto inst = build_instance(r, d, rng);
        const auto bench = benchmark_match(inst, rng);
        CHECK(is_valid_solution(inst, bench));
        CHECK(bench.pairs.size() == std::min(r, d));
        const auto opt = optimal_match(inst);
        const double opt_tug = rideshare_tug(inst, opt, bench);
        double prev = -1.0;
        for (double skill : {0.0, 0.3, 0.7, 1.0}) {
            Rng mrng(static_cast<std::uint64_t>(trial));
            const auto s = heuristic_match(inst, skill, mrng);
            CHECK(is_valid_solution(inst, s));
            CHECK(s.pairs.size() == std::min(r, d));
            const double total = total_utility(inst, s);
            // Same greedy start, more improving moves: never worse.
            CHECK(total >= prev - 1e-12);
            prev = total;
            CHECK(rideshare_tug(inst, s, bench) <= opt_tug + 1e-12);
        }
    }
    Rng bad(1);
    CHECK_THROWS_AS(heuristic_match(from_matrix(1, 1, {0.5}), 1.5, bad), UsageError);
}

TEST_CASE("benchmark edge cases") {
    Rng rng(5);
    CHECK(benchmark_match(from_matrix(1, 1, {0.3}), rng).pairs == std::vector<Assignment>{{0, 0}});
    CHECK(benchmark_match(from_matrix(0, 3, {}), rng).pairs.empty());
    const auto s = benchmark_match(from_matrix(3, 2, std::vector<double>(6, 0.5)), rng);
    CHECK(s.pairs.size() == 2);
}

TEST_CASE("rideshare_tug") {
    const auto inst = from_matrix(2, 2, {0.9, 0.1, 0.2, 0.8});
    const MatchingSolution opt{{{0, 0}, {1, 1}}};
    const MatchingSolution worse{{{0, 1}, {1, 0}}};
    CHECK(rideshare_tug(inst, opt, opt) == 0.0);
    CHECK(rideshare_tug(inst, worse, opt) == 0.0);
    CHECK(rideshare_tug(inst, opt, worse) == doctest::Approx((1.7 - 0.3) / 0.3));
    const auto unit = from_matrix(2, 2, {1.0, 0.5, 0.5, 0.7});
    CHECK(rideshare_tug(unit, MatchingSolution{{{0, 0}, {1, 1}}},
                        MatchingSolution{{{0, 1}, {1, 0}}}) == doctest::Approx(0.7));
    CHECK_THROWS_AS(rideshare_tug(inst, opt, MatchingSolution{}), DomainError);
    CHECK_THROWS_AS(rideshare_tug(inst, MatchingSolution{{{0, 0}, {1, 0}}}, opt), UsageError);
}

TEST_CASE("rider_responses") {
    auto inst = from_matrix(2, 2, {0.9, 0.1, 0.2, 0.8});
    const MatchingSolution opt{{{0, 0}, {1, 1}}};
    auto all = rider_responses(inst, opt);
    CHECK(all.acceptance_rate == 1.0);
    CHECK(all.accepted.size() == 2);
    for (auto& r : inst.riders) r.acceptance_threshold = 0.95;
    auto none = rider_responses(inst, opt);
    CHECK(none.acceptance_rate == 0.0);
    CHECK(none.rejected.size() == 2);
    CHECK(rider_responses(inst, MatchingSolution{}).acceptance_rate == 1.0);
    inst.riders[1].acceptance_threshold = 0.8;   // equal to its utility: accepts
    CHECK(rider_responses(inst, opt).acceptance_rate == 0.5);
}

TEST_CASE("acceptance rate Monte-Carlo") {
    // One rider per trial, thresholds U(0, 0.5).
    auto estimate = [](double utility_value, double city) {
        Rng rng(77);
        PopulationConfig pop;
        pop.city_size = city;
        std::size_t accepted = 0;
        const int trials = 10000;
        for (int i = 0; i < trials; ++i) {
            auto inst = build_instance(1, 1, rng, pop);
            if (utility_value >= 0.0) inst.utilities[0] = utility_value;
            accepted += rider_responses(inst, MatchingSolution{{{0, 0}}}).accepted.size();
        }
        return static_cast<double>(accepted) / trials;
    };
    CHECK(std::abs(estimate(-1.0, 0.01) - 1.0) <= 0.02);   // utilities near 1
    CHECK(std::abs(estimate(0.4, 1.0) - 0.8) <= 0.02);     // P(U(0, 0.5) <= 0.4)
}

TEST_CASE("advance_market") {
    Rng rng(9);
    auto inst = build_instance(3, 3, rng);
    for (auto& r : inst.riders) r.acceptance_threshold = 0.0;
    const auto opt = optimal_match(inst);
    ArrivalsConfig none_arrive;
    auto next = advance_market(inst, rider_responses(inst, opt), none_arrive, rng);
    CHECK(next.num_riders() == 0);
    CHECK(next.num_drivers() == 0);

    for (auto& r : inst.riders) r.acceptance_threshold = 2.0;
    ArrivalsConfig stay;
    stay.p_stay = 1.0;
    auto same = advance_market(inst, rider_responses(inst, opt), stay, rng);
    CHECK(same.num_riders() == 3);
    CHECK(same.num_drivers() == 3);
    CHECK(same.utilities == inst.utilities);
    CHECK(same.riders[2].id == inst.riders[2].id);

    ArrivalsConfig grow;
    grow.riders_per_round = 2;
    grow.drivers_per_round = 1;
    auto bigger = advance_market(inst, rider_responses(inst, opt), grow, rng);
    CHECK(bigger.num_drivers() == 4);
    CHECK(bigger.riders.back().id == inst.next_rider_id + 1);
    CHECK(bigger.utilities.size() == bigger.num_riders() * bigger.num_drivers());
}

TEST_CASE("market size stays stable when arrivals balance departures") {
    // Everyone accepts, so each round removes min(r, d) of each side and the
    // same number arrives: the population should hover around its start.
    Rng rng(123);
    ArrivalsConfig arr;
    arr.riders_per_round = 5;
    arr.drivers_per_round = 5;
    arr.population.threshold_max = 0.0;
    auto inst = build_instance(5, 5, rng, arr.population);
    double sum = 0.0;
    const int rounds = 1000;
    for (int t = 0; t < rounds; ++t) {
        sum += static_cast<double>(inst.num_riders() + inst.num_drivers());
        Rng mrng(static_cast<std::uint64_t>(t));
        const auto s = heuristic_match(inst, 0.5, mrng);
        inst = advance_market(inst, rider_responses(inst, s), arr, rng);
    }
    CHECK(std::abs(sum / rounds - 10.0) <= 1.0);

    // With private thresholds some riders reject and free drivers linger, but
    // the market still settles: mean size late in the run is within 10% of
    // its size earlier on.
    arr.population.threshold_max = 0.5;
    inst = build_instance(5, 5, rng, arr.population);
    double first = 0.0, second = 0.0;
    for (int t = 0; t < 2 * rounds; ++t) {
        if (t >= 200 && t < 1100) first += static_cast<double>(inst.num_riders() + inst.num_drivers());
        if (t >= 1100) second += static_cast<double>(inst.num_riders() + inst.num_drivers());
        const auto s = optimal_match(inst);
        inst = advance_market(inst, rider_responses(inst, s), arr, rng);
    }
    first /= 900.0;
    second /= 900.0;
    CHECK(std::abs(second - first) <= 0.1 * first);
}
