// SPDX-License-Identifier: Apache-2.0
//
// Transmission schemes compared in the experiments: RSMA with the proposed
// allocation, RSMA with equal private split (optimized or grid-searched t),
// SDMA, NOMA with near-far pairing, and grid-searched SDMA / NOMA under QoS.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsma/allocation_optimizer.hpp"
#include "rsma/channel_model.hpp"
#include "rsma/monte_carlo.hpp"

namespace rsma {

enum class SchemeKind {
    rsma_proposed,
    rsma_proposed_equal,
    rsma_exhaustive_equal,
    sdma,
    sdma_exhaustive,
    noma,
    noma_exhaustive,
};

std::string to_string(SchemeKind kind);
SchemeKind parse_scheme_kind(const std::string& name);

struct SchemeSpec {
    SchemeKind kind = SchemeKind::rsma_proposed;
    double ftpa_decay = 0.8;
    double t_granularity = 0.001;    ///< rsma_exhaustive_equal grid over t
    double mu_granularity = 0.025;   ///< sdma/noma_exhaustive grid over the power simplex
    int coarse_trials = 500;         ///< trials per grid point in the search stage
    long long evaluation_budget = 1000000;  ///< max grid points per exhaustive search
    OptimizerSettings optimizer;

    void validate() const;
};

struct SchemeResult {
    SchemeKind kind = SchemeKind::rsma_proposed;
    RateEstimate estimate;
    PowerAllocation allocation;     ///< for NOMA, mu holds the per-user power fractions
    std::string status = "ok";
    std::optional<OptimizationReport> report;
    long long grid_points = 0;
};

/// Runs the scheme's allocation rule, then estimates its rates on M trials
/// drawn from `seed`.
SchemeResult evaluate_scheme(const SchemeSpec& spec, const SystemConfig& config, const DerivedLink& link, int trials,
                             std::uint64_t seed);

struct NomaPlan {
    std::vector<std::vector<int>> groups;  ///< {strong, weak} pairs, or a singleton for odd K
    std::vector<double> power_fraction;    ///< per user, sums to 1
};

/// Near-far pairing by zeta, equal power per group, FTPA inside each group.
NomaPlan noma_allocation(const DerivedLink& link, double ftpa_decay);

/// One unit-norm precoder per group, zero-forcing across the strong members.
Eigen::MatrixXcd noma_precoders(const Eigen::MatrixXcd& h_prev, const NomaPlan& plan);

struct NomaGainSet {
    int users = 0;
    int groups = 0;
    int trials = 0;
    std::vector<double> gain;  ///< trials x K x G, |h_u^H p_g|^2 at the transmission instant
};

NomaGainSet build_noma_gain_set(const SystemConfig& config, const DerivedLink& link, const NomaPlan& plan,
                                int trials, std::uint64_t seed, ExecutionPolicy policy = ExecutionPolicy::parallel);

/// SIC rates for the given per-user power fractions; the weak member's rate is
/// the smaller of its own and the strong member's decoding rate.
RateEstimate noma_rates_from_gains(const NomaGainSet& gains, const NomaPlan& plan,
                                   const std::vector<double>& power_fraction, const DerivedLink& link,
                                   const FblPenalties& penalties, ExecutionPolicy policy = ExecutionPolicy::parallel);

/// Points of the K-simplex with coordinates on multiples of `granularity`.
/// Throws BudgetError when there would be more than `budget` points.
std::vector<std::vector<double>> simplex_grid(int k, double granularity, long long budget);
long long simplex_grid_size(int k, int steps);

}  // namespace rsma
