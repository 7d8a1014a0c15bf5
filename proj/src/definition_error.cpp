// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "rsma/errors.hpp"
#include "rsma/monte_carlo.hpp"
#include "rsma/rng.hpp"
#include "rsma/special_functions.hpp"

namespace rsma {

namespace {

struct SideValues {
    double capacity = 0.0;
    double common_dispersion = 0.0;
    double private_dispersion = 0.0;
};

SideValues evaluate_side(const GainSet& g, const DerivedLink& link, double t, const std::vector<double>& mu, int user) {
    const std::size_t k = static_cast<std::size_t>(g.users);
    std::vector<double> buf(k);
    SideValues v;
    for (int m = 0; m < g.trials; ++m) {
        const std::span<const double> cg(g.common_row(m), k);
        const std::span<const double> pg(g.priv_block(m), k * k);
        sinr_common_from_gains(cg, pg, link.zeta, t, mu, link.tx_power_mW, buf);
        const double gc = *std::min_element(buf.begin(), buf.end());
        v.capacity += std::log2(1.0 + gc);
        v.common_dispersion += std::sqrt(channel_dispersion(gc));
        sinr_private_from_gains(pg, link.zeta, t, mu, link.tx_power_mW, buf);
        v.private_dispersion += std::sqrt(channel_dispersion(buf[static_cast<std::size_t>(user)]));
    }
    v.capacity /= g.trials;
    v.common_dispersion /= g.trials;
    v.private_dispersion /= g.trials;
    return v;
}

double percent_gap(double lhs, double rhs) { return rhs != 0.0 ? 100.0 * std::abs(lhs - rhs) / std::abs(rhs) : 0.0; }

}  // namespace

double DefinitionErrorStudy::max_error() const {
    double m = 0.0;
    for (const auto* v : {&common_capacity_error, &common_dispersion_error, &private_dispersion_error})
        for (double e : *v) m = std::max(m, e);
    return m;
}

DefinitionErrorStudy definition_error_study(const SystemConfig& config, const DerivedLink& link, double t, int draws,
                                            int trials, std::uint64_t seed, int fixed_user) {
    const int k = config.num_users;
    if (draws < 1 || trials < 1) throw DomainError("definition_error_study: draws and trials must be >= 1");
    if (fixed_user < 0 || fixed_user >= k) throw DomainError("definition_error_study: fixed user out of range");
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("definition_error_study: t must lie in [0,1]");
    const GainSet gains = build_gain_set(config, link, trials, seed);
    const std::vector<double> uniform(static_cast<std::size_t>(k), 1.0 / k);
    const SideValues rhs = evaluate_side(gains, link, t, uniform, fixed_user);

    DefinitionErrorStudy study;
    study.common_capacity_reference = rhs.capacity;
    study.common_dispersion_reference = rhs.common_dispersion;
    study.private_dispersion_reference = rhs.private_dispersion;
    study.mu_draws.resize(static_cast<std::size_t>(draws));
    study.common_capacity_error.resize(static_cast<std::size_t>(draws));
    study.common_dispersion_error.resize(static_cast<std::size_t>(draws));
    study.private_dispersion_error.resize(static_cast<std::size_t>(draws));
#pragma omp parallel for schedule(static)
    for (int d = 0; d < draws; ++d) {
        TrialStream stream(seed, static_cast<std::uint64_t>(d), StreamDomain::simplex_draw);
        std::vector<double> mu(static_cast<std::size_t>(k), 0.0);
        double total = 0.0;
        for (int i = 0; i < k; ++i)
            if (i != fixed_user) total += (mu[i] = stream.exponential());
        for (int i = 0; i < k; ++i)
            mu[i] = i == fixed_user ? 1.0 / k : (total > 0.0 ? (1.0 - 1.0 / k) * mu[i] / total : 0.0);
        const SideValues lhs = evaluate_side(gains, link, t, mu, fixed_user);
        study.common_capacity_error[d] = percent_gap(lhs.capacity, rhs.capacity);
        study.common_dispersion_error[d] = percent_gap(lhs.common_dispersion, rhs.common_dispersion);
        study.private_dispersion_error[d] = percent_gap(lhs.private_dispersion, rhs.private_dispersion);
        study.mu_draws[d] = std::move(mu);
    }
    return study;
}

}  // namespace rsma
