// SPDX-License-Identifier: Apache-2.0
//
// Single-step power allocation: global split t, then either the private split
// mu without QoS plus max-min sharing of the common rate, or (common stream
// off, t = 1) the private split under per-user QoS.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsma/channel_model.hpp"
#include "rsma/closed_form_bounds.hpp"
#include "rsma/constrained_search.hpp"
#include "rsma/monte_carlo.hpp"
#include "rsma/power_allocation.hpp"

namespace rsma {

struct OptimizerSettings {
    int max_iterations = 50;
    double gradient_step = 1e-5;
    double convergence_tol = 1e-6;
    double constraint_tol = 1e-8;
    int saa_trials_for_split = 10000;
    double branch_threshold = 0.5;  ///< t* above this deactivates the common stream
    std::optional<std::uint64_t> saa_seed;  ///< defaults to config.rng_seed
    /// The private split also scans a coarse simplex grid and restarts from its best point.
    bool private_grid_restart = false;

    void validate() const;
    SearchSettings search() const;
};

struct StageResult {
    Eigen::VectorXd x;
    double objective = 0.0;  ///< maximized objective value
    int iterations = 0;
    bool converged = false;
    bool feasible = false;
    bool restoration_used = false;
    std::vector<double> objective_trace;  ///< negated objective per iterate (minimization convention)
    std::string status;
};

StageResult solve_global_power(const BoundEvaluator& bounds, const OptimizerSettings& settings = {});
StageResult solve_global_power(const SystemConfig& config, const DerivedLink& link,
                               const OptimizerSettings& settings = {});

/// Private split from mu = zeta / sum(zeta). Never returns less than the uniform split;
/// with private_grid_restart the coarse grid optimum is also a floor.
StageResult solve_private_power(double t_star, const BoundEvaluator& bounds, const OptimizerSettings& settings = {});

struct QosResult {
    StageResult stage;
    std::vector<double> qos_residuals;  ///< R_k hat - R_min per user
    std::vector<int> violated_users;
};

/// QoS-constrained private split at t = 1 from uniform mu, subject to R_k hat >= r_min.
QosResult solve_private_power_qos(const BoundEvaluator& bounds, double r_min, const OptimizerSettings& settings = {});

/// Max-min split of the common rate r_c over users with private rates r.
std::vector<double> waterfill_common_rate(double r_c, const std::vector<double>& r_private);

struct OptimizationReport {
    PowerAllocation allocation;
    double t_star_global = 0.0;  ///< global split before the branch rule
    bool common_active = false;
    std::string branch;  ///< "private_split_waterfill" or "qos_private_only"
    int iterations_global = 0;
    int iterations_stage2 = 0;
    bool converged_global = false;
    bool converged_stage2 = false;
    std::vector<double> objective_trace_global;
    std::vector<double> objective_trace_stage2;
    bool restoration_used = false;
    bool qos_feasible = true;
    std::vector<int> violated_users;
    std::vector<double> qos_residuals;
    double simplex_residual = 0.0;
    double predicted_common = 0.0;
    std::vector<double> predicted_private;
    std::optional<RateEstimate> split_estimate;  ///< SAA rates used for water-filling
};

/// Runs the full single-step update.
OptimizationReport single_step_update(const SystemConfig& config, const DerivedLink& link,
                                      const OptimizerSettings& settings = {});

}  // namespace rsma
