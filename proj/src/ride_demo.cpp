#include "pom/ride_demo.hpp"

#include <limits>

#include "pom/errors.hpp"
#include "pom/random.hpp"

namespace pom::ride {

namespace {

// Substream tags under the scenario seed.
enum Stream : std::uint64_t { kMarket = 1, kSkills = 2, kBenchmark = 3, kMatcher = 4 };

} // namespace

void RideScenario::validate() const {
    if (matchers < 1) throw ConfigError("ride demo needs at least one matcher");
    if (rounds < 1) throw ConfigError("ride demo needs at least one round");
    if (!(skill_min >= 0.0 && skill_min <= skill_max && skill_max <= 1.0))
        throw ConfigError("matcher skills must satisfy 0 <= skill_min <= skill_max <= 1");
    arrivals.validate();
    pom.validate();
}

RideDemoResult run_ride_demo(const RideScenario& scenario) {
    scenario.validate();
    RideDemoResult result;

    Rng skill_rng(derive_seed(scenario.seed, kSkills));
    result.skills.resize(scenario.matchers);
    for (std::uint32_t k = 0; k < scenario.matchers; ++k)
        result.skills[k] = scenario.skill_min == scenario.skill_max
                               ? scenario.skill_min
                               : uniform(skill_rng, scenario.skill_min, scenario.skill_max);
    if (scenario.include_optimal_matcher) result.skills[0] = 1.0;

    Rng market_rng(derive_seed(scenario.seed, kMarket));
    MatchingInstance market = build_instance(scenario.initial_riders, scenario.initial_drivers,
                                             market_rng, scenario.arrivals.population);

    Consensus consensus(scenario.matchers, scenario.pom);
    for (Round t = 1; t <= scenario.rounds; ++t) {
        Rng bench_rng(derive_seed(scenario.seed, {kBenchmark, t}));
        const MatchingSolution benchmark = benchmark_match(market, bench_rng);
        const bool degenerate = total_utility(market, benchmark) <= 0.0;

        std::vector<MatchingSolution> solutions(scenario.matchers);
        std::vector<double> tugs(scenario.matchers, std::numeric_limits<double>::quiet_NaN());
        for (std::uint32_t k = 0; k < scenario.matchers; ++k) {
            if (!consensus.is_active(SolverId{k})) continue;
            Rng matcher_rng(derive_seed(scenario.seed, {kMatcher, k, t}));
            solutions[k] = heuristic_match(market, result.skills[k], matcher_rng);
            // No pair can be formed: every matcher's gain is zero.
            tugs[k] = degenerate ? 0.0 : rideshare_tug(market, solutions[k], benchmark);
        }

        const RoundOutcome& outcome = consensus.step(make_tug_table(std::move(tugs)));
        const MatchingSolution& winning = solutions[outcome.winner.value];
        const RiderResponses responses = rider_responses(market, winning);
        consensus.record_acceptance(responses.acceptance_rate);

        result.chain = ledger::append_block(std::move(result.chain), t, outcome.winner,
                                            ledger::transactions_for(t, market, responses));
        const ledger::RoundContext context{t, outcome.winner, &market, &winning, &responses};
        const bool validated = ledger::validate_block(result.chain.back(), context).accepted();

        RideRoundRecord rec;
        rec.round = t;
        rec.riders = market.num_riders();
        rec.drivers = market.num_drivers();
        rec.matched = responses.matched();
        rec.accepted = responses.accepted.size();
        rec.acceptance_rate = responses.acceptance_rate;
        rec.winner = outcome.winner;
        rec.best = outcome.best;
        rec.winner_tug = outcome.winner_tug();
        rec.best_tug = outcome.best_tug();
        rec.active_matchers = consensus.active_ids().size();
        rec.block_validated = validated;
        rec.block_hash = ledger::to_hex(result.chain.back().hash);
        result.rounds.push_back(std::move(rec));

        market = advance_market(market, responses, scenario.arrivals, market_rng);
    }
    result.outcomes = consensus.take_outcomes();
    return result;
}

} // namespace pom::ride
