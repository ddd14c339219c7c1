#pragma once

// End-to-end PoM over a live ridesharing market: matchers propose
// matchings, the winner's matching is broadcast, riders respond, the winner
// records the accepted rides in a block and the other matchers validate it.

#include <cstdint>
#include <string>
#include <vector>

#include "pom/core.hpp"
#include "pom/ledger.hpp"
#include "pom/rideshare.hpp"

namespace pom::ride {

struct RideScenario {
    std::size_t initial_riders = 5;
    std::size_t initial_drivers = 5;
    ArrivalsConfig arrivals;                 // per-round arrivals, p_stay, population
    std::uint32_t matchers = 3;
    double skill_min = 0.0;                  // matcher skills ~ U(min, max)
    double skill_max = 1.0;
    bool include_optimal_matcher = false;    // matcher 0 gets skill 1
    Round rounds = 20;
    PomParams pom;
    std::uint64_t seed = 20240101;

    void validate() const;
};

struct RideRoundRecord {
    Round round = 0;
    std::size_t riders = 0;
    std::size_t drivers = 0;
    std::size_t matched = 0;
    std::size_t accepted = 0;
    double acceptance_rate = 1.0;
    SolverId winner;
    SolverId best;
    double winner_tug = 0.0;
    double best_tug = 0.0;
    std::size_t active_matchers = 0;
    bool block_validated = false;
    std::string block_hash;
};

struct RideDemoResult {
    std::vector<double> skills;
    std::vector<RideRoundRecord> rounds;
    std::vector<RoundOutcome> outcomes;
    ledger::Chain chain;
};

RideDemoResult run_ride_demo(const RideScenario& scenario);

} // namespace pom::ride
