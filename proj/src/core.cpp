#include "pom/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pom/errors.hpp"

namespace pom {

void PomParams::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw ConfigError("lambda must lie in [0, 1], got " + std::to_string(lambda));
    if (quit_checkpoint < 1)
        throw ConfigError("quit checkpoint must be at least 1 round");
}

TugTable make_tug_table(std::vector<double> tugs) {
    return std::make_shared<const std::vector<double>>(std::move(tugs));
}

double tug_from_utilities(double total_utility, double benchmark_utility) {
    if (!(benchmark_utility > 0.0))
        throw DomainError("benchmark utility must be positive to define a TUG baseline");
    return std::max(0.0, (total_utility - benchmark_utility) / benchmark_utility);
}

double adjustment_score(bool was_winner_previous_round, double prev_acceptance_rate,
                        double lambda) {
    if (!(prev_acceptance_rate >= 0.0 && prev_acceptance_rate <= 1.0))
        throw UsageError("acceptance rate must lie in [0, 1]");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw UsageError("lambda must lie in [0, 1]");
    return was_winner_previous_round ? prev_acceptance_rate * (1.0 - lambda) : 1.0;
}

SolverState accumulate_wss(SolverState state, double tug, double adjustment) {
    if (!state.active)
        throw UsageError("cannot accumulate WSS for inactive solver " +
                         std::to_string(state.id.value));
    state.wss += tug * adjustment;
    return state;
}

SolverId select_winner(std::span<const SolverState> states) {
    const SolverState* best = nullptr;
    for (const auto& s : states) {
        if (!s.active) continue;
        if (best == nullptr || s.wss > best->wss || (s.wss == best->wss && s.id < best->id))
            best = &s;
    }
    if (best == nullptr) throw UsageError("select_winner needs at least one active solver");
    return best->id;
}

QuitResult apply_quit_rule(std::vector<SolverState> states, Round round, Round qc) {
    if (round < 1) throw UsageError("rounds are numbered from 1");
    QuitResult result;
    for (auto& s : states) {
        if (s.active && round - s.last_win_round > qc) {
            s.active = false;
            result.quit_ids.push_back(s.id);
        }
    }
    result.states = std::move(states);
    return result;
}

namespace {

double lookup_tug(const std::vector<double>& table, SolverId id) {
    if (id.value >= table.size() || std::isnan(table[id.value]))
        throw UsageError("missing TUG for active solver " + std::to_string(id.value));
    double tug = table[id.value];
    if (tug < 0.0) throw UsageError("TUG must be nonnegative");
    return tug;
}

} // namespace

StepResult step_round(std::vector<SolverState> states, const TugTable& tug_by_solver,
                      std::optional<SolverId> prev_winner, double prev_acceptance,
                      const PomParams& params, Round round) {
    if (round < 1) throw UsageError("rounds are numbered from 1");
    if (round == 1 && prev_winner) throw UsageError("round 1 has no previous winner");
    if (!tug_by_solver) throw UsageError("step_round needs a TUG table");
    const auto& table = *tug_by_solver;

    RoundOutcome outcome;
    outcome.round = round;
    outcome.tug_by_solver = tug_by_solver;

    bool have_best = false;
    double best_tug = 0.0;
    for (auto& s : states) {
        if (!s.active) continue;
        const double tug = lookup_tug(table, s.id);
        const bool won_last = prev_winner && *prev_winner == s.id;
        s = accumulate_wss(std::move(s), tug,
                           adjustment_score(won_last, prev_acceptance, params.lambda));
        if (!have_best || tug > best_tug || (tug == best_tug && s.id < outcome.best)) {
            outcome.best = s.id;
            best_tug = tug;
            have_best = true;
        }
    }

    outcome.winner = select_winner(states);
    for (auto& s : states) {
        if (s.id == outcome.winner) {
            s.win_rounds.push_back(round);
            s.last_win_round = round;
            break;
        }
    }

    auto quit = apply_quit_rule(std::move(states), round, params.quit_checkpoint);
    outcome.quit_ids = std::move(quit.quit_ids);
    return {std::move(quit.states), std::move(outcome)};
}

std::vector<SolverState> initial_states(std::size_t num_solvers) {
    std::vector<SolverState> states(num_solvers);
    for (std::size_t i = 0; i < num_solvers; ++i)
        states[i].id = SolverId{static_cast<std::uint32_t>(i)};
    return states;
}

Consensus::Consensus(std::size_t num_solvers, PomParams params)
    : params_(params), states_(initial_states(num_solvers)) {
    params_.validate();
    if (num_solvers == 0) throw ConfigError("consensus needs at least one solver");
}

const RoundOutcome& Consensus::step(const TugTable& tugs) {
    if (awaiting_acceptance_)
        throw UsageError("record_acceptance must follow every step");
    std::optional<SolverId> prev_winner;
    double prev_alpha = 1.0;
    if (!outcomes_.empty()) {
        prev_winner = outcomes_.back().winner;
        prev_alpha = *outcomes_.back().acceptance_rate;
    }
    auto result = step_round(std::move(states_), tugs, prev_winner, prev_alpha, params_,
                             round_ + 1);
    states_ = std::move(result.states);
    outcomes_.push_back(std::move(result.outcome));
    ++round_;
    awaiting_acceptance_ = true;
    return outcomes_.back();
}

void Consensus::record_acceptance(double alpha) {
    if (!awaiting_acceptance_) throw UsageError("no pending round to record acceptance for");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw UsageError("acceptance rate must lie in [0, 1]");
    outcomes_.back().acceptance_rate = alpha;
    awaiting_acceptance_ = false;
}

std::vector<SolverId> Consensus::active_ids() const {
    std::vector<SolverId> ids;
    for (const auto& s : states_)
        if (s.active) ids.push_back(s.id);
    return ids;
}

} // namespace pom
