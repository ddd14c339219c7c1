#include "pom/dcp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pom/errors.hpp"

namespace pom {

void DesignerPreferences::validate() const {
    if (!(beta > 0.0 && beta < 1.0))
        throw ConfigError("beta must lie in (0, 1), got " + std::to_string(beta));
    if (!(equ_min >= 0.0)) throw ConfigError("equ_min must be nonnegative");
    if (!(ine_max >= 0.0)) throw ConfigError("ine_max must be nonnegative");
}

bool is_feasible(const SweepPoint& point, const DesignerPreferences& prefs) {
    return point.mean_equity >= prefs.equ_min && point.mean_inefficiency <= prefs.ine_max &&
           point.lambda >= 0.0 && point.lambda <= 1.0;
}

std::vector<SweepPoint> mark_feasible(std::span<const SweepPoint> sweep,
                                      const DesignerPreferences& prefs) {
    std::vector<SweepPoint> out(sweep.begin(), sweep.end());
    for (auto& p : out) p.feasible = is_feasible(p, prefs);
    return out;
}

DcpEndpoints endpoints_of(std::span<const SweepPoint> sweep) {
    const SweepPoint* lo = nullptr;
    const SweepPoint* hi = nullptr;
    for (const auto& p : sweep) {
        if (std::abs(p.lambda) < 1e-9) lo = &p;
        if (std::abs(p.lambda - 1.0) < 1e-9) hi = &p;
    }
    if (lo == nullptr || hi == nullptr)
        throw DomainError("sweep must include lambda = 0 and lambda = 1");
    return {lo->mean_equity, hi->mean_equity, lo->mean_inefficiency, hi->mean_inefficiency};
}

double objective(const SweepPoint& point, const DcpEndpoints& e, double beta) {
    const double equ_span = e.equity_at_1 - e.equity_at_0;
    const double ine_span = e.inefficiency_at_1 - e.inefficiency_at_0;
    if (equ_span == 0.0 || ine_span == 0.0)
        throw DomainError("objective normalization undefined: endpoint values coincide");
    // Monte-Carlo noise can push a point slightly past an endpoint.
    const double equ_gain = std::clamp((point.mean_equity - e.equity_at_0) / equ_span, 0.0, 1.0);
    const double ine_slack =
        std::clamp((e.inefficiency_at_1 - point.mean_inefficiency) / ine_span, 0.0, 1.0);
    return std::pow(equ_gain, beta) * std::pow(ine_slack, 1.0 - beta);
}

DcpChoice choose_dcp(std::span<const SweepPoint> sweep, const DesignerPreferences& prefs) {
    if (sweep.empty()) throw UsageError("choose_dcp needs a nonempty sweep");
    prefs.validate();
    const auto ends = endpoints_of(sweep);

    std::vector<SweepPoint> points(sweep.begin(), sweep.end());
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.lambda < b.lambda; });

    DcpChoice choice;
    for (const auto& p : points) {
        if (!is_feasible(p, prefs)) continue;
        choice.feasible_lambdas.push_back(p.lambda);
        const double value = objective(p, ends, prefs.beta);
        if (!choice.lambda || value > choice.objective) {
            choice.lambda = p.lambda;
            choice.objective = value;
        }
    }
    return choice;
}

std::vector<double> default_beta_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 9; ++i) g.push_back(i / 10.0);
    return g;
}

} // namespace pom
