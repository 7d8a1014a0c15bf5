// SPDX-License-Identifier: Apache-2.0

#include "rsma/allocation_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "rsma/errors.hpp"

namespace rsma {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

StageResult to_stage(const SearchResult& r) {
    StageResult s;
    s.x = r.x;
    s.objective = -r.objective;
    s.iterations = r.iterations;
    s.converged = r.converged;
    s.feasible = r.feasible;
    s.restoration_used = r.restoration_used;
    s.objective_trace = r.objective_trace;
    s.status = r.status;
    return s;
}

SearchProblem simplex_problem(int k) {
    SearchProblem p;
    p.equalities.push_back([](const Eigen::VectorXd& x) { return x.sum() - 1.0; });
    p.lower = Eigen::VectorXd::Zero(k);
    p.upper = Eigen::VectorXd::Ones(k);
    return p;
}

}  // namespace

void OptimizerSettings::validate() const {
    search().validate();
    if (saa_trials_for_split < 1) throw DomainError("OptimizerSettings: saa_trials_for_split must be >= 1");
    if (!(branch_threshold >= 0.0 && branch_threshold <= 1.0))
        throw DomainError("OptimizerSettings: branch_threshold must lie in [0,1]");
}

SearchSettings OptimizerSettings::search() const {
    SearchSettings s;
    s.max_iterations = max_iterations;
    s.gradient_step = gradient_step;
    s.convergence_tol = convergence_tol;
    s.constraint_tol = constraint_tol;
    return s;
}

StageResult solve_global_power(const BoundEvaluator& bounds, const OptimizerSettings& settings) {
    settings.validate();
    const std::vector<double> mu(static_cast<std::size_t>(bounds.users()), 1.0 / bounds.users());
    SearchProblem p;
    p.objective = [&](const Eigen::VectorXd& x) { return -bounds.sum(x(0), mu); };
    p.lower = Eigen::VectorXd::Zero(1);
    p.upper = Eigen::VectorXd::Ones(1);
    return to_stage(constrained_local_search(p, Eigen::VectorXd::Constant(1, 0.5), settings.search()));
}

StageResult solve_global_power(const SystemConfig& config, const DerivedLink& link,
                               const OptimizerSettings& settings) {
    return solve_global_power(BoundEvaluator(config, link), settings);
}

namespace {

// Visits every point of the simplex with coordinates on a grid of 1/steps,
// where steps is the finest of 10, 5, 2, 1 giving at most 5000 points.
void for_each_coarse_simplex_point(int k, const std::function<void(const Eigen::VectorXd&)>& visit) {
    int steps = 10;
    auto count = [k](int n) {
        double c = 1.0;
        for (int i = 1; i < k; ++i) c = c * (n + i) / i;
        return c;
    };
    while (steps > 1 && count(steps) > 5000.0) steps = steps == 10 ? 5 : steps == 5 ? 2 : 1;
    Eigen::VectorXd x(k);
    std::vector<int> parts(static_cast<std::size_t>(k), 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == k - 1) {
            parts[static_cast<std::size_t>(pos)] = remaining;
            for (int i = 0; i < k; ++i) x(i) = parts[static_cast<std::size_t>(i)] / static_cast<double>(steps);
            visit(x);
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            parts[static_cast<std::size_t>(pos)] = v;
            rec(pos + 1, remaining - v);
        }
    };
    rec(0, steps);
}

}  // namespace

StageResult solve_private_power(double t_star, const BoundEvaluator& bounds, const OptimizerSettings& settings) {
    settings.validate();
    if (!(t_star >= 0.0 && t_star <= 1.0)) throw DomainError("solve_private_power: t must lie in [0,1]");
    const int k = bounds.users();
    SearchProblem p = simplex_problem(k);
    auto objective = [&](const Eigen::VectorXd& x) {
        return -bounds.private_sum(t_star, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    };
    p.objective = objective;
    Eigen::VectorXd x0(k);
    double zsum = 0.0;
    for (double z : bounds.zeta()) zsum += z;
    for (int i = 0; i < k; ++i) x0(i) = bounds.zeta()[i] / zsum;
    StageResult r = to_stage(constrained_local_search(p, x0, settings.search()));

    // The closed-form private sum is far from concave when interference
    // dominates and its optimum then sits on a face of the simplex, out of
    // reach from the zeta-proportional start. The second start is the uniform
    // point, or the best coarse grid point when asked for.
    Eigen::VectorXd seed = Eigen::VectorXd::Constant(k, 1.0 / k);
    double seed_value = -objective(seed);
    if (settings.private_grid_restart)
        for_each_coarse_simplex_point(k, [&](const Eigen::VectorXd& x) {
            const double v = -objective(x);
            if (v > seed_value) {
                seed_value = v;
                seed = x;
            }
        });
    if (seed_value > r.objective) {
        StageResult again = to_stage(constrained_local_search(p, seed, settings.search()));
        if (again.feasible && again.objective >= seed_value) {
            again.status += "+restart";
            return again;
        }
        r.x = seed;
        r.objective = seed_value;
        r.status += "+fallback";
    }
    return r;
}

QosResult solve_private_power_qos(const BoundEvaluator& bounds, double r_min, const OptimizerSettings& settings) {
    settings.validate();
    if (!(r_min >= 0.0)) throw DomainError("solve_private_power_qos: r_min must be >= 0");
    const int k = bounds.users();
    SearchProblem p = simplex_problem(k);
    p.objective = [&](const Eigen::VectorXd& x) {
        return -bounds.private_sum(1.0, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    };
    for (int i = 0; i < k; ++i)
        p.inequalities.push_back([&, i](const Eigen::VectorXd& x) {
            return bounds.private_unclamped(1.0, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                                            i) -
                   r_min;
        });
    QosResult out;
    out.stage = to_stage(constrained_local_search(p, Eigen::VectorXd::Constant(k, 1.0 / k), settings.search()));
    const std::vector<double> mu = to_vector(out.stage.x);
    for (int i = 0; i < k; ++i) {
        const double res = bounds.private_unclamped(1.0, mu, i) - r_min;
        out.qos_residuals.push_back(res);
        if (res < -settings.constraint_tol) out.violated_users.push_back(i);
    }
    return out;
}

std::vector<double> waterfill_common_rate(double r_c, const std::vector<double>& r_private) {
    if (!(r_c >= 0.0)) throw DomainError("waterfill_common_rate: r_c must be >= 0");
    for (double r : r_private)
        if (!(r >= 0.0)) throw DomainError("waterfill_common_rate: private rates must be >= 0");
    const std::size_t k = r_private.size();
    std::vector<double> c(k, 0.0);
    if (k == 0) return c;
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r_private[a] < r_private[b]; });
    double level = 0.0;
    for (std::size_t j = k; j >= 1; --j) {
        double prefix = 0.0;
        for (std::size_t i = 0; i < j; ++i) prefix += r_private[order[i]];
        level = (r_c + prefix) / static_cast<double>(j);
        if (r_private[order[j - 1]] <= level) break;
    }
    for (std::size_t i = 0; i < k; ++i) c[i] = std::max(0.0, level - r_private[i]);
    return c;
}

OptimizationReport single_step_update(const SystemConfig& config, const DerivedLink& link,
                                      const OptimizerSettings& settings) {
    settings.validate();
    const BoundEvaluator bounds(config, link);
    const int k = config.num_users;
    OptimizationReport rep;

    const StageResult p1 = solve_global_power(bounds, settings);
    rep.t_star_global = p1.x(0);
    rep.iterations_global = p1.iterations;
    rep.converged_global = p1.converged;
    rep.objective_trace_global = p1.objective_trace;
    rep.common_active = rep.t_star_global <= settings.branch_threshold;

    rep.allocation.c.assign(static_cast<std::size_t>(k), 0.0);
    if (!rep.common_active) {
        rep.branch = "qos_private_only";
        rep.allocation.t = 1.0;
        const QosResult q = solve_private_power_qos(bounds, config.qos_min_rate, settings);
        rep.allocation.mu = to_vector(q.stage.x);
        rep.iterations_stage2 = q.stage.iterations;
        rep.converged_stage2 = q.stage.converged;
        rep.objective_trace_stage2 = q.stage.objective_trace;
        rep.restoration_used = q.stage.restoration_used;
        rep.qos_residuals = q.qos_residuals;
        rep.violated_users = q.violated_users;
        rep.qos_feasible = q.violated_users.empty();
    } else {
        rep.branch = "private_split_waterfill";
        rep.allocation.t = rep.t_star_global;
        const StageResult p2 = solve_private_power(rep.allocation.t, bounds, settings);
        rep.allocation.mu = to_vector(p2.x);
        rep.iterations_stage2 = p2.iterations;
        rep.converged_stage2 = p2.converged;
        rep.objective_trace_stage2 = p2.objective_trace;
        rep.restoration_used = p2.restoration_used;
        const std::uint64_t seed = settings.saa_seed.value_or(config.rng_seed);
        const RateEstimate est = saa_rates(rep.allocation, config, link, settings.saa_trials_for_split, seed);
        rep.allocation.c = waterfill_common_rate(est.r_common, est.r_private);
        rep.split_estimate = est;
        for (int i = 0; i < k; ++i) rep.qos_residuals.push_back(rep.allocation.c[i] + est.r_private[i] - config.qos_min_rate);
        for (int i = 0; i < k; ++i)
            if (rep.qos_residuals[i] < -settings.constraint_tol) rep.violated_users.push_back(i);
        rep.qos_feasible = rep.violated_users.empty();
    }
    double s = 0.0;
    for (double m : rep.allocation.mu) s += m;
    rep.simplex_residual = std::abs(s - 1.0);
    rep.predicted_common = bounds.common(rep.allocation.t);
    rep.predicted_private = bounds.private_rates(rep.allocation.t, rep.allocation.mu);
    return rep;
}

}  // namespace rsma
