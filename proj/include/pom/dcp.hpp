#pragma once

// Designer's choice of lambda: maximize a Cobb-Douglas blend of normalized
// equity gain and normalized efficiency over a simulated lambda sweep,
// subject to a minimum equity and a maximum inefficiency.

#include <optional>
#include <span>
#include <vector>

namespace pom {

struct DesignerPreferences {
    double beta = 0.5;       // weight on equity, (0, 1)
    double equ_min = 15.0;   // minimum mean steady-state solver count
    double ine_max = 0.025;  // maximum mean steady-state inefficiency

    void validate() const;
};

struct SweepPoint {
    double lambda = 0.0;
    double mean_equity = 0.0;
    double mean_inefficiency = 0.0;
    bool feasible = false;
};

bool is_feasible(const SweepPoint& point, const DesignerPreferences& prefs);

// Copies of the points with `feasible` set from prefs.
std::vector<SweepPoint> mark_feasible(std::span<const SweepPoint> sweep,
                                      const DesignerPreferences& prefs);

struct DcpEndpoints {
    double equity_at_0 = 0.0;
    double equity_at_1 = 0.0;
    double inefficiency_at_0 = 0.0;
    double inefficiency_at_1 = 0.0;
};

// Values at lambda = 0 and lambda = 1; DomainError if either is missing.
DcpEndpoints endpoints_of(std::span<const SweepPoint> sweep);

double objective(const SweepPoint& point, const DcpEndpoints& endpoints, double beta);

struct DcpChoice {
    std::optional<double> lambda;        // empty when nothing is feasible
    double objective = 0.0;
    std::vector<double> feasible_lambdas;

    bool feasible() const { return lambda.has_value(); }
};

// Ties on the objective go to the smaller lambda.
DcpChoice choose_dcp(std::span<const SweepPoint> sweep, const DesignerPreferences& prefs);

std::vector<double> default_beta_grid();   // 0.1, ..., 0.9

} // namespace pom
