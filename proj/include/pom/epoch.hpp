#pragma once

#include <cstdint>
#include <vector>

#include "pom/core.hpp"

namespace pom {

// One run of the abstract solver model. Defaults are the reference setup:
// 1500 rounds, 100 solvers, capabilities U(0.7, 1), lambda 0.5, alpha 0.8.
struct EpochConfig {
    Round total_rounds = 1500;
    std::uint32_t num_solvers = 100;
    double capability_lower_bound = 0.7;
    double lambda = 0.5;
    double acceptance_rate = 0.8;
    Round quit_checkpoint = 100;
    std::uint64_t seed = 20240101;

    void validate() const;
    PomParams pom_params() const { return {lambda, quit_checkpoint}; }
};

struct EpochResult {
    std::vector<RoundOutcome> outcomes;
    std::vector<double> capabilities;      // indexed by SolverId::value
    Round steady_state_round = 0;          // last round with a quit, 0 if none
    bool converged = false;
    std::vector<SolverId> survivor_ids;    // ascending

    Round total_rounds() const { return static_cast<Round>(outcomes.size()); }
};

} // namespace pom
