// SPDX-License-Identifier: Apache-2.0

#include "rsma/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsma/errors.hpp"
#include "rsma/special_functions.hpp"

namespace rsma {

void PowerAllocation::validate(double tol) const {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("PowerAllocation: t outside [0,1]");
    double s = 0.0;
    for (double m : mu) {
        if (!(m >= -tol)) throw DomainError("PowerAllocation: negative mu entry");
        s += m;
    }
    if (mu.empty() || std::abs(s - 1.0) > tol) throw DomainError("PowerAllocation: mu off the simplex");
    if (!c.empty() && c.size() != mu.size()) throw DomainError("PowerAllocation: c and mu lengths differ");
    for (double v : c)
        if (!(v >= 0.0)) throw DomainError("PowerAllocation: negative common share");
}

FblPenalties FblPenalties::from_config(const SystemConfig& config) {
    FblPenalties p;
    double worst = 0.0;
    for (double b : config.bler_common) worst = std::max(worst, gauss_q_inv(b));
    p.common = worst / std::sqrt(static_cast<double>(config.blocklength_common));
    for (int k = 0; k < config.num_users; ++k)
        p.priv.push_back(gauss_q_inv(config.bler_private[k]) /
                         std::sqrt(static_cast<double>(config.blocklength_private[k])));
    return p;
}

namespace {

void fill_trial(GainSet& g, const SystemConfig& config, const DerivedLink& link, int m, int& resamples) {
    const ChannelRealization r = draw_realization(config, link, g.seed, static_cast<std::uint64_t>(m));
    const TrialGains tg = compute_gains(r);
    std::copy(tg.common.begin(), tg.common.end(), g.common.begin() + static_cast<std::ptrdiff_t>(m) * g.users);
    std::copy(tg.priv.begin(), tg.priv.end(),
              g.priv.begin() + static_cast<std::ptrdiff_t>(m) * g.users * g.users);
    resamples = r.resamples;
}

// Per-trial rates for one allocation; writes common, K private values.
void trial_rates(const GainSet& g, int m, const PowerAllocation& a, const DerivedLink& link,
                 const FblPenalties& pen, double* sinr_buf, double* out_common, double* out_private) {
    const std::size_t k = static_cast<std::size_t>(g.users);
    const std::span<const double> cg(g.common_row(m), k);
    const std::span<const double> pg(g.priv_block(m), k * k);
    std::span<double> buf(sinr_buf, k);
    if (a.t < 1.0) {
        sinr_common_from_gains(cg, pg, link.zeta, a.t, a.mu, link.tx_power_mW, buf);
        *out_common = fbl_rate_fast(*std::min_element(buf.begin(), buf.end()), pen.common);
    } else {
        *out_common = 0.0;
    }
    sinr_private_from_gains(pg, link.zeta, a.t, a.mu, link.tx_power_mW, buf);
    for (std::size_t i = 0; i < k; ++i) out_private[i] = fbl_rate_fast(buf[i], pen.priv[i]);
}

}  // namespace

GainSet build_gain_set(const SystemConfig& config, const DerivedLink& link, int trials, std::uint64_t seed,
                       ExecutionPolicy policy) {
    if (trials < 1) throw DomainError("build_gain_set: trials must be >= 1");
    GainSet g;
    g.users = config.num_users;
    g.trials = trials;
    g.seed = seed;
    g.common.resize(static_cast<std::size_t>(trials) * g.users);
    g.priv.resize(static_cast<std::size_t>(trials) * g.users * g.users);
    std::vector<int> resamples(static_cast<std::size_t>(trials), 0);
    if (policy == ExecutionPolicy::parallel) {
        std::string failure;
#pragma omp parallel for schedule(static)
        for (int m = 0; m < trials; ++m) {
            try {
                fill_trial(g, config, link, m, resamples[m]);
            } catch (const std::exception& e) {
#pragma omp critical(rsma_gain_failure)
                if (failure.empty()) failure = e.what();
            }
        }
        if (!failure.empty()) throw NumericError("build_gain_set: " + failure);
    } else {
        for (int m = 0; m < trials; ++m) fill_trial(g, config, link, m, resamples[m]);
    }
    for (int r : resamples) g.resamples += r;
    return g;
}

SampleStats sample_stats(const std::vector<double>& values) {
    SampleStats s;
    const std::size_t n = values.size();
    if (n == 0) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(n);
    if (n < 2) return s;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    return s;
}

RateEstimate saa_rates_from_gains(const GainSet& gains, const PowerAllocation& allocation, const DerivedLink& link,
                                  const FblPenalties& penalties, ExecutionPolicy policy) {
    const int k = gains.users;
    const int trials = gains.trials;
    if (static_cast<int>(allocation.mu.size()) != k || link.users() != k ||
        static_cast<int>(penalties.priv.size()) != k)
        throw DomainError("saa_rates: allocation, link and gain set disagree on K");
    std::vector<double> common(static_cast<std::size_t>(trials));
    std::vector<double> priv(static_cast<std::size_t>(trials) * k);
    if (policy == ExecutionPolicy::parallel) {
#pragma omp parallel
        {
            std::vector<double> buf(static_cast<std::size_t>(k));
#pragma omp for schedule(static)
            for (int m = 0; m < trials; ++m)
                trial_rates(gains, m, allocation, link, penalties, buf.data(), &common[m],
                            &priv[static_cast<std::size_t>(m) * k]);
        }
    } else {
        std::vector<double> buf(static_cast<std::size_t>(k));
        for (int m = 0; m < trials; ++m)
            trial_rates(gains, m, allocation, link, penalties, buf.data(), &common[m],
                        &priv[static_cast<std::size_t>(m) * k]);
    }

    RateEstimate est;
    est.trials = trials;
    const SampleStats sc = sample_stats(common);
    est.r_common = sc.mean;
    est.se_common = sc.std_error;
    std::vector<double> column(static_cast<std::size_t>(trials));
    std::vector<double> sums(common);
    for (int i = 0; i < k; ++i) {
        for (int m = 0; m < trials; ++m) {
            column[m] = priv[static_cast<std::size_t>(m) * k + i];
            sums[m] += column[m];
        }
        const SampleStats sp = sample_stats(column);
        est.r_private.push_back(sp.mean);
        est.se_private.push_back(sp.std_error);
    }
    const SampleStats ss = sample_stats(sums);
    est.sum_rate = est.r_common;
    for (double r : est.r_private) est.sum_rate += r;
    est.se_sum = ss.std_error;
    int argmin = 0;
    for (int i = 0; i < k; ++i) {
        const double ci = allocation.c.empty() ? 0.0 : allocation.c[i];
        const double v = ci + est.r_private[i];
        if (i == 0 || v < est.min_rate) {
            est.min_rate = v;
            argmin = i;
        }
    }
    // The minimizing user's total rate per trial credits it the share
    // c_k / R_c of that trial's common rate; its mean is exactly c_k + R_k.
    const double ck = allocation.c.empty() ? 0.0 : allocation.c[argmin];
    const double share = est.r_common > 0.0 ? ck / est.r_common : 0.0;
    for (int m = 0; m < trials; ++m) column[m] = share * common[m] + priv[static_cast<std::size_t>(m) * k + argmin];
    est.se_min = sample_stats(column).std_error;
    return est;
}

RateEstimate saa_rates(const PowerAllocation& allocation, const SystemConfig& config, const DerivedLink& link,
                       int trials, std::uint64_t seed, ExecutionPolicy policy) {
    const GainSet g = build_gain_set(config, link, trials, seed, policy);
    return saa_rates_from_gains(g, allocation, link, FblPenalties::from_config(config), policy);
}

}  // namespace rsma
