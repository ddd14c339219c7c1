#pragma once

// Proof-of-Merit consensus state machine.
//
// Each round every active solver submits a solution whose quality is its
// Total Utility Gain (TUG). A solver's Winner Selection Score (WSS) is the
// running sum of its TUGs, each scaled by a post-winning adjustment that is
// alpha_{t-1} * (1 - lambda) in the round right after a win and 1 otherwise.
// The highest WSS wins the round. A solver that goes more than `qc` rounds
// without a win leaves for good.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace pom {

using Round = std::uint32_t;

struct SolverId {
    std::uint32_t value = 0;

    friend constexpr auto operator<=>(SolverId, SolverId) = default;
};

struct PomParams {
    double lambda = 0.5;              // decentralization control parameter, [0, 1]
    Round quit_checkpoint = 100;      // qc, rounds without a win before quitting

    void validate() const;
};

struct SolverState {
    SolverId id;
    double wss = 0.0;
    Round last_win_round = 0;         // 0 = never won
    std::vector<Round> win_rounds;    // ascending
    bool active = true;
};

// TUG of every solver for one round, indexed by SolverId::value. Shared and
// immutable so a constant table can back every round of an epoch.
using TugTable = std::shared_ptr<const std::vector<double>>;

TugTable make_tug_table(std::vector<double> tugs);

struct RoundOutcome {
    Round round = 0;
    TugTable tug_by_solver;
    SolverId winner;
    SolverId best;                         // argmax TUG among solvers active this round
    std::optional<double> acceptance_rate; // filled once users have responded
    std::vector<SolverId> quit_ids;

    double tug(SolverId id) const { return (*tug_by_solver)[id.value]; }
    double winner_tug() const { return tug(winner); }
    double best_tug() const { return tug(best); }
};

double tug_from_utilities(double total_utility, double benchmark_utility);

double adjustment_score(bool was_winner_previous_round, double prev_acceptance_rate,
                        double lambda);

SolverState accumulate_wss(SolverState state, double tug, double adjustment);

// Highest WSS among the active states; ties go to the smallest id.
SolverId select_winner(std::span<const SolverState> states);

struct QuitResult {
    std::vector<SolverState> states;
    std::vector<SolverId> quit_ids;
};

QuitResult apply_quit_rule(std::vector<SolverState> states, Round round, Round qc);

struct StepResult {
    std::vector<SolverState> states;
    RoundOutcome outcome;
};

StepResult step_round(std::vector<SolverState> states, const TugTable& tug_by_solver,
                      std::optional<SolverId> prev_winner, double prev_acceptance,
                      const PomParams& params, Round round);

std::vector<SolverState> initial_states(std::size_t num_solvers);

// Drives step_round across consecutive rounds and keeps the trace.
class Consensus {
public:
    Consensus(std::size_t num_solvers, PomParams params);

    const RoundOutcome& step(const TugTable& tugs);

    // Acceptance rate of the most recent winning solution; must be called once
    // after every step before the next one.
    void record_acceptance(double alpha);

    Round round() const { return round_; }
    const PomParams& params() const { return params_; }
    std::span<const SolverState> states() const { return states_; }
    std::span<const RoundOutcome> outcomes() const { return outcomes_; }
    // Moves the trace out; the instance must not be stepped afterwards.
    std::vector<RoundOutcome> take_outcomes() { return std::move(outcomes_); }
    std::vector<SolverId> active_ids() const;
    bool is_active(SolverId id) const { return states_[id.value].active; }

private:
    PomParams params_;
    std::vector<SolverState> states_;
    std::vector<RoundOutcome> outcomes_;
    Round round_ = 0;
    bool awaiting_acceptance_ = false;
};

} // namespace pom
