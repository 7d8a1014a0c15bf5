// SPDX-License-Identifier: Apache-2.0
//
// Sample-average estimates of the ergodic FBL rates. Channel gains are drawn
// once per (config, seed, M) into a GainSet and reused across allocations.
// Each kernel has an OpenMP version and a serial reference; both write
// per-trial results into index-ordered buffers and reduce them serially, so
// the two agree bit for bit for any thread count.

#pragma once

#include <cstdint>
#include <vector>

#include "rsma/channel_model.hpp"
#include "rsma/power_allocation.hpp"

namespace rsma {

enum class ExecutionPolicy { serial, parallel };

struct GainSet {
    int users = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<double> common;  ///< trials x K
    std::vector<double> priv;    ///< trials x K x K
    long long resamples = 0;     ///< ill-conditioned draws discarded while building

    const double* common_row(int m) const { return common.data() + static_cast<std::size_t>(m) * users; }
    const double* priv_block(int m) const {
        return priv.data() + static_cast<std::size_t>(m) * users * users;
    }
};

GainSet build_gain_set(const SystemConfig& config, const DerivedLink& link, int trials, std::uint64_t seed,
                       ExecutionPolicy policy = ExecutionPolicy::parallel);

struct RateEstimate {
    double r_common = 0.0;
    std::vector<double> r_private;
    double sum_rate = 0.0;
    double min_rate = 0.0;  ///< min_k (c_k + R_k)
    int trials = 0;
    double se_common = 0.0;
    std::vector<double> se_private;
    double se_sum = 0.0;
    double se_min = 0.0;  ///< standard error of the minimizing user's c_k + R_k
};

/// FBL penalty factors Q^{-1}(beta)/sqrt(l); the common one uses the worst user.
struct FblPenalties {
    double common = 0.0;
    std::vector<double> priv;

    static FblPenalties from_config(const SystemConfig& config);
};

RateEstimate saa_rates_from_gains(const GainSet& gains, const PowerAllocation& allocation, const DerivedLink& link,
                                  const FblPenalties& penalties, ExecutionPolicy policy = ExecutionPolicy::parallel);

/// Draws M realizations from `seed` and averages the instantaneous rates.
RateEstimate saa_rates(const PowerAllocation& allocation, const SystemConfig& config, const DerivedLink& link,
                       int trials, std::uint64_t seed, ExecutionPolicy policy = ExecutionPolicy::parallel);

/// Per-trial mean and standard error of a sample, in index order.
struct SampleStats {
    double mean = 0.0;
    double std_error = 0.0;
};
SampleStats sample_stats(const std::vector<double>& values);


/// Percentage gaps between the exact-mu and equal-split sides of the three
/// equal-power approximations used by the bounds, one entry per mu draw:
/// common capacity, common dispersion term and private dispersion term.
struct DefinitionErrorStudy {
    std::vector<std::vector<double>> mu_draws;
    std::vector<double> common_capacity_error;
    std::vector<double> common_dispersion_error;
    std::vector<double> private_dispersion_error;
    double common_capacity_reference = 0.0;  ///< equal-split side
    double common_dispersion_reference = 0.0;
    double private_dispersion_reference = 0.0;

    double max_error() const;
};

/// User `fixed_user` keeps mu = 1/K; the remaining 1 - 1/K is split by a
/// symmetric Dirichlet(1) draw. All draws share one set of channel trials.
DefinitionErrorStudy definition_error_study(const SystemConfig& config, const DerivedLink& link, double t,
                                            int draws, int trials, std::uint64_t seed, int fixed_user = 0);

}  // namespace rsma
