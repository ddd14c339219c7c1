#include "pom/rideshare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pom/assignment.hpp"
#include "pom/core.hpp"
#include "pom/errors.hpp"

namespace pom::ride {

double distance(Point2 a, Point2 b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

void PopulationConfig::validate() const {
    if (!(city_size > 0.0)) throw ConfigError("city size must be positive");
    if (!(threshold_min <= threshold_max))
        throw ConfigError("threshold_min must not exceed threshold_max");
}

void ArrivalsConfig::validate() const {
    if (!(p_stay >= 0.0 && p_stay <= 1.0)) throw ConfigError("p_stay must lie in [0, 1]");
    population.validate();
}

double utility(const Rider& rider, const Driver& driver) {
    return 1.0 / (1.0 + distance(rider.location, driver.location));
}

void MatchingInstance::recompute_utilities() {
    utilities.assign(riders.size() * drivers.size(), 0.0);
    for (std::size_t i = 0; i < riders.size(); ++i)
        for (std::size_t j = 0; j < drivers.size(); ++j)
            utilities[i * drivers.size() + j] = ride::utility(riders[i], drivers[j]);
}

bool is_valid_solution(const MatchingInstance& instance, const MatchingSolution& solution) {
    std::vector<bool> rider_used(instance.num_riders(), false);
    std::vector<bool> driver_used(instance.num_drivers(), false);
    for (const auto& a : solution.pairs) {
        if (a.rider >= instance.num_riders() || a.driver >= instance.num_drivers()) return false;
        if (rider_used[a.rider] || driver_used[a.driver]) return false;
        rider_used[a.rider] = driver_used[a.driver] = true;
    }
    return true;
}

double total_utility(const MatchingInstance& instance, const MatchingSolution& solution) {
    double sum = 0.0;
    for (const auto& a : solution.pairs) sum += instance.utility(a.rider, a.driver);
    return sum;
}

namespace {

Point2 random_point(Rng& rng, double size) {
    const double x = uniform(rng, 0.0, size);
    const double y = uniform(rng, 0.0, size);
    return {x, y};
}

Rider new_rider(std::uint64_t id, Rng& rng, const PopulationConfig& pop) {
    Rider r;
    r.id = id;
    r.location = random_point(rng, pop.city_size);
    r.destination = random_point(rng, pop.city_size);
    r.acceptance_threshold = pop.threshold_min == pop.threshold_max
                                 ? pop.threshold_min
                                 : uniform(rng, pop.threshold_min, pop.threshold_max);
    return r;
}

Driver new_driver(std::uint64_t id, Rng& rng, const PopulationConfig& pop) {
    return {id, random_point(rng, pop.city_size)};
}

void sort_pairs(MatchingSolution& s) {
    std::sort(s.pairs.begin(), s.pairs.end(),
              [](const auto& a, const auto& b) { return a.rider < b.rider; });
}

MatchingSolution from_row_map(const std::vector<std::size_t>& rider_to_driver) {
    MatchingSolution s;
    for (std::size_t i = 0; i < rider_to_driver.size(); ++i)
        if (rider_to_driver[i] != kUnassigned) s.pairs.push_back({i, rider_to_driver[i]});
    return s;
}

} // namespace

MatchingInstance build_instance(std::size_t num_riders, std::size_t num_drivers, Rng& rng,
                                const PopulationConfig& population) {
    population.validate();
    MatchingInstance inst;
    inst.riders.reserve(num_riders);
    inst.drivers.reserve(num_drivers);
    for (std::size_t i = 0; i < num_riders; ++i)
        inst.riders.push_back(new_rider(inst.next_rider_id++, rng, population));
    for (std::size_t j = 0; j < num_drivers; ++j)
        inst.drivers.push_back(new_driver(inst.next_driver_id++, rng, population));
    inst.recompute_utilities();
    return inst;
}

MatchingSolution benchmark_match(const MatchingInstance& instance, Rng& rng) {
    std::vector<std::size_t> riders(instance.num_riders());
    std::vector<std::size_t> drivers(instance.num_drivers());
    std::iota(riders.begin(), riders.end(), 0);
    std::iota(drivers.begin(), drivers.end(), 0);
    shuffle(riders, rng);
    shuffle(drivers, rng);
    MatchingSolution s;
    const std::size_t n = std::min(riders.size(), drivers.size());
    for (std::size_t k = 0; k < n; ++k) s.pairs.push_back({riders[k], drivers[k]});
    sort_pairs(s);
    return s;
}

MatchingSolution optimal_match(const MatchingInstance& instance) {
    return from_row_map(max_weight_assignment(instance.utilities, instance.num_riders(),
                                              instance.num_drivers()));
}

MatchingSolution greedy_match(const MatchingInstance& instance, Rng& rng) {
    std::vector<std::size_t> order(instance.num_riders());
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    std::vector<bool> taken(instance.num_drivers(), false);
    std::size_t free_drivers = instance.num_drivers();
    MatchingSolution s;
    for (std::size_t i : order) {
        if (free_drivers == 0) break;
        std::size_t best = kUnassigned;
        for (std::size_t j = 0; j < instance.num_drivers(); ++j) {
            if (taken[j]) continue;
            if (best == kUnassigned || instance.utility(i, j) > instance.utility(i, best))
                best = j;
        }
        taken[best] = true;
        --free_drivers;
        s.pairs.push_back({i, best});
    }
    sort_pairs(s);
    return s;
}

MatchingSolution improve_by_swaps(const MatchingInstance& instance, MatchingSolution start,
                                  std::size_t max_moves) {
    const std::size_t R = instance.num_riders();
    const std::size_t D = instance.num_drivers();
    std::vector<std::size_t> r2d(R, kUnassigned), d2r(D, kUnassigned);
    for (const auto& a : start.pairs) {
        r2d[a.rider] = a.driver;
        d2r[a.driver] = a.rider;
    }
    auto u = [&](std::size_t i, std::size_t j) { return instance.utility(i, j); };
    constexpr double kMinGain = 1e-12;

    for (std::size_t move = 0; move < max_moves; ++move) {
        enum class Kind { None, Swap, ToFreeDriver, Handover } kind = Kind::None;
        double best_gain = kMinGain;
        std::size_t bi = 0, bj = 0;

        for (std::size_t a = 0; a < R; ++a) {
            const std::size_t da = r2d[a];
            if (da == kUnassigned) {
                // Unmatched rider takes an assigned driver from another rider.
                for (std::size_t d = 0; d < D; ++d) {
                    const std::size_t b = d2r[d];
                    if (b == kUnassigned) continue;
                    const double gain = u(a, d) - u(b, d);
                    if (gain > best_gain) { best_gain = gain; kind = Kind::Handover; bi = a; bj = d; }
                }
                continue;
            }
            for (std::size_t b = a + 1; b < R; ++b) {
                const std::size_t db = r2d[b];
                if (db == kUnassigned) continue;
                const double gain = u(a, db) + u(b, da) - u(a, da) - u(b, db);
                if (gain > best_gain) { best_gain = gain; kind = Kind::Swap; bi = a; bj = b; }
            }
            for (std::size_t f = 0; f < D; ++f) {
                if (d2r[f] != kUnassigned) continue;
                const double gain = u(a, f) - u(a, da);
                if (gain > best_gain) { best_gain = gain; kind = Kind::ToFreeDriver; bi = a; bj = f; }
            }
        }

        if (kind == Kind::None) break;
        if (kind == Kind::Swap) {
            const std::size_t da = r2d[bi], db = r2d[bj];
            r2d[bi] = db; r2d[bj] = da;
            d2r[db] = bi; d2r[da] = bj;
        } else if (kind == Kind::ToFreeDriver) {
            d2r[r2d[bi]] = kUnassigned;
            r2d[bi] = bj;
            d2r[bj] = bi;
        } else {
            const std::size_t loser = d2r[bj];
            r2d[loser] = kUnassigned;
            r2d[bi] = bj;
            d2r[bj] = bi;
        }
    }
    return from_row_map(r2d);
}

MatchingSolution heuristic_match(const MatchingInstance& instance, double skill, Rng& rng) {
    if (!(skill >= 0.0 && skill <= 1.0)) throw UsageError("matcher skill must lie in [0, 1]");
    if (skill >= 1.0) return optimal_match(instance);
    MatchingSolution greedy = greedy_match(instance, rng);
    const auto size = std::min(instance.num_riders(), instance.num_drivers());
    const auto moves = static_cast<std::size_t>(std::floor(skill * static_cast<double>(size)));
    return improve_by_swaps(instance, std::move(greedy), moves);
}

double rideshare_tug(const MatchingInstance& instance, const MatchingSolution& solution,
                     const MatchingSolution& benchmark) {
    if (!is_valid_solution(instance, solution) || !is_valid_solution(instance, benchmark))
        throw UsageError("rideshare_tug needs valid one-to-one solutions");
    return tug_from_utilities(total_utility(instance, solution),
                              total_utility(instance, benchmark));
}

RiderResponses rider_responses(const MatchingInstance& instance,
                               const MatchingSolution& winning_solution) {
    if (!is_valid_solution(instance, winning_solution))
        throw UsageError("winning solution is not a valid matching");
    RiderResponses r;
    for (const auto& a : winning_solution.pairs) {
        const bool accept =
            instance.utility(a.rider, a.driver) >= instance.riders[a.rider].acceptance_threshold;
        (accept ? r.accepted : r.rejected).push_back(a);
    }
    if (r.matched() > 0)
        r.acceptance_rate =
            static_cast<double>(r.accepted.size()) / static_cast<double>(r.matched());
    return r;
}

MatchingInstance advance_market(const MatchingInstance& instance,
                                const RiderResponses& responses,
                                const ArrivalsConfig& arrivals, Rng& rng) {
    arrivals.validate();
    std::vector<bool> rider_gone(instance.num_riders(), false);
    std::vector<bool> driver_gone(instance.num_drivers(), false);
    for (const auto& a : responses.accepted) {
        if (a.rider >= rider_gone.size() || a.driver >= driver_gone.size())
            throw UsageError("accepted pair outside the instance");
        rider_gone[a.rider] = true;
        driver_gone[a.driver] = true;
    }
    // Draws are taken in rejected-list order so the stream is reproducible.
    for (const auto& a : responses.rejected) {
        if (a.rider >= rider_gone.size()) throw UsageError("rejected pair outside the instance");
        if (!bernoulli(rng, arrivals.p_stay)) rider_gone[a.rider] = true;
    }

    MatchingInstance next;
    next.next_rider_id = instance.next_rider_id;
    next.next_driver_id = instance.next_driver_id;
    for (std::size_t i = 0; i < instance.num_riders(); ++i)
        if (!rider_gone[i]) next.riders.push_back(instance.riders[i]);
    for (std::size_t j = 0; j < instance.num_drivers(); ++j)
        if (!driver_gone[j]) next.drivers.push_back(instance.drivers[j]);
    for (std::size_t k = 0; k < arrivals.riders_per_round; ++k)
        next.riders.push_back(new_rider(next.next_rider_id++, rng, arrivals.population));
    for (std::size_t k = 0; k < arrivals.drivers_per_round; ++k)
        next.drivers.push_back(new_driver(next.next_driver_id++, rng, arrivals.population));
    next.recompute_utilities();
    return next;
}

} // namespace pom::ride
