#pragma once

// Batch commands behind the `pom` tool. Each writes CSV files (header row,
// fixed column order) into `spec.out`; progress and warnings go to `log`.
//
//   simulate    epochs.csv        epoch,s,converged,equity,inefficiency,gini
//               summary.csv       lower_bound,lambda,alpha,qc,rounds,matchers,epochs,
//                                 converged_epochs,non_converged_epochs,
//                                 mean_inefficiency,std_inefficiency,mean_equity,
//                                 std_equity,mean_gini,std_gini,mean_convergence,
//                                 std_convergence
//               percentile_wins.csv  percentile,mean_wins
//   sweep       sweep.csv         lower_bound,lambda,mean_inefficiency,std_inefficiency,
//                                 mean_equity,std_equity,mean_convergence,
//                                 std_convergence,mean_gini,std_gini,mean_top_wins,
//                                 converged_epochs,non_converged_epochs
//               roc.csv           lower_bound,lambda,inefficiency_norm,equity_norm
//   choose-dcp  choice.csv        lower_bound,beta,lambda_star,objective,feasible_lambdas
//   ride-demo   rounds.csv        round,riders,drivers,matched,accepted,alpha,winner,best,
//                                 winner_tug,best_tug,active_matchers,block_valid,block_hash
//               matchers.csv      matcher,skill,wins,active
//               chain.log         see pom/ledger.hpp
//   calibrate   calibration.csv   qc,mean_convergence,converged_epochs

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pom/dcp.hpp"
#include "pom/epoch.hpp"
#include "pom/harness.hpp"
#include "pom/ride_demo.hpp"

namespace pom::cli {

struct ExperimentSpec {
    EpochConfig epoch;
    std::uint32_t epochs = 500;
    std::vector<double> lambda_grid = default_lambda_grid();
    std::vector<double> lower_bound_grid = default_lower_bound_grid();
    std::vector<double> beta_grid = default_beta_grid();
    double equ_min = 15.0;
    double ine_max = 0.025;
    std::filesystem::path out = ".";
    std::filesystem::path sweep_input;   // choose-dcp: reuse an existing sweep.csv
    ride::RideScenario ride;
    CalibrationOptions calibration;
    unsigned threads = 0;

    void validate() const;
};

inline constexpr std::uint32_t kCiEpochs = 50;

std::vector<std::filesystem::path> cmd_simulate(const ExperimentSpec& spec, std::ostream& log);
std::vector<std::filesystem::path> cmd_sweep(const ExperimentSpec& spec, std::ostream& log);
std::vector<std::filesystem::path> cmd_choose_dcp(const ExperimentSpec& spec, std::ostream& log);
std::vector<std::filesystem::path> cmd_ride_demo(const ExperimentSpec& spec, std::ostream& log);
std::vector<std::filesystem::path> cmd_calibrate(const ExperimentSpec& spec, std::ostream& log);

// Sweep points per lower bound, read back from a sweep.csv.
std::vector<std::pair<double, std::vector<SweepPoint>>>
load_sweep_points(const std::filesystem::path& sweep_csv);

} // namespace pom::cli
