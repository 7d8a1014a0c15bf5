// SPDX-License-Identifier: Apache-2.0

#include "rsma/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rsma/errors.hpp"

namespace rsma {

namespace {

// Separate stream for the coarse search stage so its winner is not scored on
// the same draws that select it.
std::uint64_t coarse_seed(std::uint64_t seed) { return seed * 6364136223846793005ULL + 1442695040888963407ULL; }

int grid_steps(double granularity) {
    const double steps = 1.0 / granularity;
    const long long rounded = std::llround(steps);
    if (std::abs(steps - static_cast<double>(rounded)) > 1e-9 * steps || rounded < 1)
        throw ConfigError("granularity must divide 1 into an integer number of steps");
    return static_cast<int>(rounded);
}

PowerAllocation with_waterfill(PowerAllocation a, const GainSet& gains, const DerivedLink& link,
                               const FblPenalties& pen) {
    const RateEstimate est = saa_rates_from_gains(gains, a, link, pen);
    a.c = waterfill_common_rate(est.r_common, est.r_private);
    return a;
}

double min_private(const RateEstimate& e) { return *std::min_element(e.r_private.begin(), e.r_private.end()); }

// Picks the best point by sum rate among QoS-feasible candidates, else by min rate.
struct GridChoice {
    std::size_t index = 0;
    bool feasible = false;
};

GridChoice choose(const std::vector<RateEstimate>& est, double r_min) {
    GridChoice best;
    double best_value = -1.0;
    for (std::size_t i = 0; i < est.size(); ++i)
        if (min_private(est[i]) >= r_min && est[i].sum_rate > best_value) {
            best_value = est[i].sum_rate;
            best = {i, true};
        }
    if (best.feasible) return best;
    for (std::size_t i = 0; i < est.size(); ++i)
        if (min_private(est[i]) > best_value) {
            best_value = min_private(est[i]);
            best.index = i;
        }
    return best;
}

}  // namespace

std::string to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::rsma_proposed: return "rsma_proposed";
        case SchemeKind::rsma_proposed_equal: return "rsma_proposed_equal";
        case SchemeKind::rsma_exhaustive_equal: return "rsma_exhaustive_equal";
        case SchemeKind::sdma: return "sdma";
        case SchemeKind::sdma_exhaustive: return "sdma_exhaustive";
        case SchemeKind::noma: return "noma";
        case SchemeKind::noma_exhaustive: return "noma_exhaustive";
    }
    return "unknown";
}

SchemeKind parse_scheme_kind(const std::string& name) {
    for (SchemeKind k : {SchemeKind::rsma_proposed, SchemeKind::rsma_proposed_equal, SchemeKind::rsma_exhaustive_equal,
                         SchemeKind::sdma, SchemeKind::sdma_exhaustive, SchemeKind::noma, SchemeKind::noma_exhaustive})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown scheme kind '" + name + "'");
}

void SchemeSpec::validate() const {
    if (!(t_granularity > 0.0 && t_granularity <= 1.0) || !(mu_granularity > 0.0 && mu_granularity <= 1.0))
        throw ConfigError("scheme granularities must lie in (0,1]");
    if (!(ftpa_decay >= 0.0)) throw ConfigError("ftpa_decay must be >= 0");
    if (coarse_trials < 1) throw ConfigError("coarse_trials must be >= 1");
    if (evaluation_budget < 1) throw ConfigError("evaluation_budget must be >= 1");
    optimizer.validate();
}

long long simplex_grid_size(int k, int steps) {
    // C(steps + k - 1, k - 1), saturating well above any sane budget.
    long double c = 1.0L;
    for (int i = 1; i < k; ++i) c = c * static_cast<long double>(steps + i) / static_cast<long double>(i);
    return c > 9e18L ? static_cast<long long>(9e18) : static_cast<long long>(std::llround(static_cast<double>(c)));
}

std::vector<std::vector<double>> simplex_grid(int k, double granularity, long long budget) {
    if (k < 1) throw DomainError("simplex_grid: k must be >= 1");
    const int steps = grid_steps(granularity);
    const long long count = simplex_grid_size(k, steps);
    if (count > budget)
        throw BudgetError("simplex grid with " + std::to_string(count) + " points exceeds the budget of " +
                          std::to_string(budget));
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<int> parts(static_cast<std::size_t>(k), 0);
    // Enumerate compositions of `steps` into k parts in lexicographic order.
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == k - 1) {
            parts[pos] = remaining;
            std::vector<double> p(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) p[i] = static_cast<double>(parts[i]) / steps;
            out.push_back(std::move(p));
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            parts[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    rec(rec, 0, steps);
    return out;
}

NomaPlan noma_allocation(const DerivedLink& link, double ftpa_decay) {
    const int k = link.users();
    if (k < 1) throw DomainError("noma_allocation: no users");
    if (!(ftpa_decay >= 0.0)) throw DomainError("noma_allocation: decay must be >= 0");
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return link.zeta[a] > link.zeta[b]; });
    NomaPlan plan;
    for (int i = 0; i < k / 2; ++i) plan.groups.push_back({order[i], order[k - 1 - i]});
    if (k % 2 == 1) plan.groups.push_back({order[k / 2]});
    plan.power_fraction.assign(static_cast<std::size_t>(k), 0.0);
    const double per_group = 1.0 / static_cast<double>(plan.groups.size());
    for (const auto& g : plan.groups) {
        double norm = 0.0;
        for (int u : g) norm += std::pow(link.zeta[u], -ftpa_decay);
        for (int u : g) plan.power_fraction[u] = per_group * std::pow(link.zeta[u], -ftpa_decay) / norm;
    }
    return plan;
}

Eigen::MatrixXcd noma_precoders(const Eigen::MatrixXcd& h_prev, const NomaPlan& plan) {
    Eigen::MatrixXcd reps(h_prev.rows(), static_cast<Eigen::Index>(plan.groups.size()));
    for (std::size_t g = 0; g < plan.groups.size(); ++g) reps.col(static_cast<Eigen::Index>(g)) = h_prev.col(plan.groups[g][0]);
    return zf_precoders(reps);
}

NomaGainSet build_noma_gain_set(const SystemConfig& config, const DerivedLink& link, const NomaPlan& plan,
                                int trials, std::uint64_t seed, ExecutionPolicy policy) {
    if (trials < 1) throw DomainError("build_noma_gain_set: trials must be >= 1");
    NomaGainSet gs;
    gs.users = config.num_users;
    gs.groups = static_cast<int>(plan.groups.size());
    gs.trials = trials;
    const std::size_t block = static_cast<std::size_t>(gs.users) * gs.groups;
    gs.gain.resize(block * trials);
    auto fill = [&](int m) {
        ChannelRealization r = draw_realization(config, link, seed, static_cast<std::uint64_t>(m));
        // The group representatives are a column subset of h_prev; a
        // well-conditioned full Gram keeps the subset well-conditioned too.
        const Eigen::MatrixXcd p = noma_precoders(r.h_prev, plan);
        const Eigen::MatrixXcd proj = r.h_curr.adjoint() * p;
        double* out = gs.gain.data() + block * static_cast<std::size_t>(m);
        for (int u = 0; u < gs.users; ++u)
            for (int g = 0; g < gs.groups; ++g) out[static_cast<std::size_t>(u) * gs.groups + g] = std::norm(proj(u, g));
    };
    if (policy == ExecutionPolicy::parallel) {
        std::string failure;
#pragma omp parallel for schedule(static)
        for (int m = 0; m < trials; ++m) {
            try {
                fill(m);
            } catch (const std::exception& e) {
#pragma omp critical(rsma_noma_failure)
                if (failure.empty()) failure = e.what();
            }
        }
        if (!failure.empty()) throw NumericError("build_noma_gain_set: " + failure);
    } else {
        for (int m = 0; m < trials; ++m) fill(m);
    }
    return gs;
}

RateEstimate noma_rates_from_gains(const NomaGainSet& gains, const NomaPlan& plan,
                                   const std::vector<double>& power_fraction, const DerivedLink& link,
                                   const FblPenalties& penalties, ExecutionPolicy policy) {
    const int k = gains.users;
    const int ng = gains.groups;
    if (static_cast<int>(power_fraction.size()) != k) throw DomainError("noma_rates: power vector must have K entries");
    const double p = link.tx_power_mW;
    std::vector<double> group_power(static_cast<std::size_t>(ng), 0.0);
    for (int g = 0; g < ng; ++g)
        for (int u : plan.groups[g]) group_power[g] += p * power_fraction[u];
    std::vector<double> rates(static_cast<std::size_t>(gains.trials) * k);
    const std::size_t block = static_cast<std::size_t>(k) * ng;

    auto trial = [&](int m) {
        const double* gm = gains.gain.data() + block * static_cast<std::size_t>(m);
        auto gain = [&](int u, int g) { return gm[static_cast<std::size_t>(u) * ng + g]; };
        auto inter = [&](int u, int own) {
            double s = 0.0;
            for (int g = 0; g < ng; ++g)
                if (g != own) s += group_power[g] * gain(u, g);
            return s * link.zeta[u];
        };
        double* out = rates.data() + static_cast<std::size_t>(m) * k;
        for (int g = 0; g < ng; ++g) {
            const auto& members = plan.groups[g];
            const int s = members[0];
            const double ps = p * power_fraction[s];
            const double gs = gain(s, g) * link.zeta[s];
            const double is = inter(s, g);
            out[s] = fbl_rate_fast(ps * gs / (is + 1.0), penalties.priv[s]);
            if (members.size() < 2) continue;
            const int w = members[1];
            const double pw = p * power_fraction[w];
            const double gw = gain(w, g) * link.zeta[w];
            const double own = fbl_rate_fast(pw * gw / (ps * gw + inter(w, g) + 1.0), penalties.priv[w]);
            const double at_strong = fbl_rate_fast(pw * gs / (ps * gs + is + 1.0), penalties.priv[w]);
            out[w] = std::min(own, at_strong);
        }
    };
    if (policy == ExecutionPolicy::parallel) {
#pragma omp parallel for schedule(static)
        for (int m = 0; m < gains.trials; ++m) trial(m);
    } else {
        for (int m = 0; m < gains.trials; ++m) trial(m);
    }

    RateEstimate est;
    est.trials = gains.trials;
    std::vector<double> column(static_cast<std::size_t>(gains.trials));
    std::vector<double> sums(static_cast<std::size_t>(gains.trials), 0.0);
    for (int u = 0; u < k; ++u) {
        for (int m = 0; m < gains.trials; ++m) {
            column[m] = rates[static_cast<std::size_t>(m) * k + u];
            sums[m] += column[m];
        }
        const SampleStats st = sample_stats(column);
        est.r_private.push_back(st.mean);
        est.se_private.push_back(st.std_error);
        est.sum_rate += st.mean;
    }
    est.se_sum = sample_stats(sums).std_error;
    const auto it = std::min_element(est.r_private.begin(), est.r_private.end());
    est.min_rate = *it;
    est.se_min = est.se_private[static_cast<std::size_t>(it - est.r_private.begin())];
    return est;
}

SchemeResult evaluate_scheme(const SchemeSpec& spec, const SystemConfig& config, const DerivedLink& link, int trials,
                             std::uint64_t seed) {
    spec.validate();
    if (trials < 1) throw ConfigError("trials must be >= 1");
    const int k = config.num_users;
    const FblPenalties pen = FblPenalties::from_config(config);
    SchemeResult res;
    res.kind = spec.kind;

    if (spec.kind == SchemeKind::noma || spec.kind == SchemeKind::noma_exhaustive) {
        const NomaPlan plan = noma_allocation(link, spec.ftpa_decay);
        std::vector<double> power = plan.power_fraction;
        if (spec.kind == SchemeKind::noma_exhaustive) {
            const auto grid = simplex_grid(k, spec.mu_granularity, spec.evaluation_budget);
            res.grid_points = static_cast<long long>(grid.size());
            const NomaGainSet coarse = build_noma_gain_set(config, link, plan, spec.coarse_trials, coarse_seed(seed));
            std::vector<RateEstimate> est(grid.size());
            const long long points = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(dynamic, 64)
            for (long long i = 0; i < points; ++i)
                est[i] = noma_rates_from_gains(coarse, plan, grid[i], link, pen, ExecutionPolicy::serial);
            const GridChoice c = choose(est, config.qos_min_rate);
            power = grid[c.index];
            if (!c.feasible) res.status = "maxmin_fallback";
        }
        const NomaGainSet full = build_noma_gain_set(config, link, plan, trials, seed);
        res.estimate = noma_rates_from_gains(full, plan, power, link, pen);
        res.allocation.t = 1.0;
        res.allocation.mu = power;
        res.allocation.c.assign(static_cast<std::size_t>(k), 0.0);
        return res;
    }

    const GainSet gains = build_gain_set(config, link, trials, seed);
    switch (spec.kind) {
        case SchemeKind::rsma_proposed: {
            OptimizationReport rep = single_step_update(config, link, spec.optimizer);
            res.allocation = rep.allocation;
            if (!rep.qos_feasible) res.status = "qos_infeasible";
            res.report = std::move(rep);
            break;
        }
        case SchemeKind::rsma_proposed_equal: {
            const BoundEvaluator bounds(config, link);
            const StageResult p1 = solve_global_power(bounds, spec.optimizer);
            PowerAllocation a = PowerAllocation::uniform(k, p1.x(0));
            const GainSet split = build_gain_set(config, link, spec.optimizer.saa_trials_for_split,
                                                 spec.optimizer.saa_seed.value_or(config.rng_seed));
            res.allocation = with_waterfill(a, split, link, pen);
            break;
        }
        case SchemeKind::rsma_exhaustive_equal: {
            const int steps = grid_steps(spec.t_granularity);
            if (steps + 1 > spec.evaluation_budget) throw BudgetError("t grid exceeds the evaluation budget");
            res.grid_points = steps + 1;
            const GainSet coarse = build_gain_set(config, link, spec.coarse_trials, coarse_seed(seed));
            double best = -1.0;
            double best_t = 1.0;
            for (int i = 0; i <= steps; ++i) {
                const double t = static_cast<double>(i) / steps;
                const double s =
                    saa_rates_from_gains(coarse, PowerAllocation::uniform(k, t), link, pen, ExecutionPolicy::serial)
                        .sum_rate;
                if (s > best) {
                    best = s;
                    best_t = t;
                }
            }
            res.allocation = with_waterfill(PowerAllocation::uniform(k, best_t), gains, link, pen);
            break;
        }
        case SchemeKind::sdma:
            res.allocation = PowerAllocation::uniform(k, 1.0);
            break;
        case SchemeKind::sdma_exhaustive: {
            const auto grid = simplex_grid(k, spec.mu_granularity, spec.evaluation_budget);
            res.grid_points = static_cast<long long>(grid.size());
            const GainSet coarse = build_gain_set(config, link, spec.coarse_trials, coarse_seed(seed));
            std::vector<RateEstimate> est(grid.size());
            const long long points = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(dynamic, 64)
            for (long long i = 0; i < points; ++i) {
                PowerAllocation candidate = PowerAllocation::uniform(k, 1.0);
                candidate.mu = grid[i];
                est[i] = saa_rates_from_gains(coarse, candidate, link, pen, ExecutionPolicy::serial);
            }
            PowerAllocation a = PowerAllocation::uniform(k, 1.0);
            const GridChoice c = choose(est, config.qos_min_rate);
            a.mu = grid[c.index];
            res.allocation = a;
            if (!c.feasible) res.status = "maxmin_fallback";
            break;
        }
        default:
            break;
    }
    res.estimate = saa_rates_from_gains(gains, res.allocation, link, pen);
    return res;
}

}  // namespace rsma
