#pragma once

// Ridesharing instantiation: riders and drivers on a square city, matchers of
// varying skill proposing one-to-one matchings, a random-pairing benchmark,
// and riders who privately accept or reject the winning match.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pom/random.hpp"

namespace pom::ride {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(Point2 a, Point2 b);

struct Rider {
    std::uint64_t id = 0;
    Point2 location;
    Point2 destination;
    double acceptance_threshold = 0.0;   // private: minimum utility accepted
};

struct Driver {
    std::uint64_t id = 0;
    Point2 location;
};

struct PopulationConfig {
    double city_size = 1.0;       // side of the square city
    double threshold_min = 0.0;   // rider thresholds ~ U(min, max)
    double threshold_max = 0.5;

    void validate() const;
};

// 1 / (1 + pickup distance): in (0, 1], decreasing in distance.
double utility(const Rider& rider, const Driver& driver);

struct MatchingInstance {
    std::vector<Rider> riders;
    std::vector<Driver> drivers;
    std::vector<double> utilities;   // riders x drivers, row-major
    std::uint64_t next_rider_id = 0;
    std::uint64_t next_driver_id = 0;

    std::size_t num_riders() const { return riders.size(); }
    std::size_t num_drivers() const { return drivers.size(); }
    double utility(std::size_t rider, std::size_t driver) const {
        return utilities[rider * drivers.size() + driver];
    }
    void recompute_utilities();
};

// Indices into the instance's rider and driver vectors.
struct Assignment {
    std::size_t rider = 0;
    std::size_t driver = 0;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct MatchingSolution {
    std::vector<Assignment> pairs;   // ascending by rider index
};

// In range and injective on both sides.
bool is_valid_solution(const MatchingInstance& instance, const MatchingSolution& solution);

double total_utility(const MatchingInstance& instance, const MatchingSolution& solution);

MatchingInstance build_instance(std::size_t num_riders, std::size_t num_drivers, Rng& rng,
                                const PopulationConfig& population = {});

// Uniformly random pairing of min(riders, drivers) pairs.
MatchingSolution benchmark_match(const MatchingInstance& instance, Rng& rng);

// Maximum total utility.
MatchingSolution optimal_match(const MatchingInstance& instance);

// Riders in random order each take their nearest free driver.
MatchingSolution greedy_match(const MatchingInstance& instance, Rng& rng);

// Best-improvement local search from `start`: swap two riders' drivers, move a
// rider to a free driver, or hand an assigned driver to an unmatched rider.
MatchingSolution improve_by_swaps(const MatchingInstance& instance, MatchingSolution start,
                                  std::size_t max_moves);

// skill = 1: optimal. skill = 0: greedy. Otherwise greedy followed by
// floor(skill * min(riders, drivers)) improving moves.
MatchingSolution heuristic_match(const MatchingInstance& instance, double skill, Rng& rng);

// Total utility gain of `solution` over `benchmark`, floored at 0.
double rideshare_tug(const MatchingInstance& instance, const MatchingSolution& solution,
                     const MatchingSolution& benchmark);

struct RiderResponses {
    std::vector<Assignment> accepted;
    std::vector<Assignment> rejected;
    double acceptance_rate = 1.0;   // 1 when nobody was matched

    std::size_t matched() const { return accepted.size() + rejected.size(); }
};

// Rider i accepts iff u(i, assigned driver) >= its private threshold.
RiderResponses rider_responses(const MatchingInstance& instance,
                               const MatchingSolution& winning_solution);

struct ArrivalsConfig {
    std::size_t riders_per_round = 0;
    std::size_t drivers_per_round = 0;
    double p_stay = 0.5;   // a rejecting rider waits for the next round
    PopulationConfig population;

    void validate() const;
};

// Accepted riders and their drivers leave; rejecting riders stay with
// probability p_stay; unmatched riders and free drivers stay; arrivals join.
MatchingInstance advance_market(const MatchingInstance& instance,
                                const RiderResponses& responses,
                                const ArrivalsConfig& arrivals, Rng& rng);

} // namespace pom::ride
