// SPDX-License-Identifier: Apache-2.0

#include "rsma/closed_form_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "rsma/errors.hpp"

namespace rsma {

namespace {

constexpr double kTMin = 1e-4;
constexpr double kTMax = 1.0 - 1e-4;

double sum_squares_except(std::span<const double> mu, int skip) {
    double s = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j)
        if (static_cast<int>(j) != skip) s += mu[j] * mu[j];
    return s;
}

void check_user(std::span<const double> mu, int k) {
    if (k < 0 || k >= static_cast<int>(mu.size())) throw DomainError("user index out of range");
}

}  // namespace

void GammaParams::validate() const {
    if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale))
        throw DomainError("GammaParams: shape and scale must be positive and finite");
}

GammaParams gamma_moment_match(std::span<const GammaParams> components) {
    if (components.empty()) throw DomainError("gamma_moment_match: empty component list");
    double m1 = 0.0;
    double m2 = 0.0;
    for (const auto& c : components) {
        c.validate();
        m1 += c.shape * c.scale;
        m2 += c.shape * c.scale * c.scale;
    }
    return {m1 * m1 / m2, m2 / m1};
}

GammaParams aggregate_interference_params(int nt, int k, double epsilon) {
    if (k < 1 || nt < k) throw DomainError("aggregate_interference_params: need Nt >= K >= 1");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("aggregate_interference_params: epsilon outside [0,1]");
    const double e2 = epsilon * epsilon;
    const double m1 = e2 * (nt + 1) + (1.0 - 2.0 * e2) * k;
    const double m2 = e2 * e2 * (nt + 1) + (1.0 - 2.0 * e2) * k;
    if (!(m1 > 0.0) || !(m2 > 0.0)) throw DomainError("aggregate_interference_params: degenerate moments");
    return {m1 * m1 / m2, m2 / m1};
}

int round_nearest(double x) { return static_cast<int>(std::round(x)); }

CommonBoundParams common_cdf_params(double t, double power_mW, std::span<const double> zeta, int nt,
                                    std::span<const double> epsilon) {
    if (!(t > 0.0 && t < 1.0))
        throw SingularParameterError("common_cdf_params: t must lie strictly inside (0,1)");
    if (!(power_mW > 0.0)) throw DomainError("common_cdf_params: power must be positive");
    const int k = static_cast<int>(zeta.size());
    if (k < 1 || static_cast<int>(epsilon.size()) != k)
        throw DomainError("common_cdf_params: zeta and epsilon must have K >= 1 entries");
    CommonBoundParams p;
    p.c1 = 0.0;
    double shape_sum = 0.0;
    double weighted_scale = 0.0;
    for (int i = 0; i < k; ++i) {
        if (!(zeta[i] > 0.0)) throw DomainError("common_cdf_params: zeta must be positive");
        p.c1 += 1.0 / (zeta[i] * power_mW * (1.0 - t));
        const GammaParams g = aggregate_interference_params(nt, k, epsilon[i]);
        shape_sum += g.shape;
        weighted_scale += g.shape * g.scale;
    }
    const double scale = weighted_scale / shape_sum;
    p.c2 = scale * t / (k * (1.0 - t));
    p.d_int = std::max(1, round_nearest(shape_sum));
    return p;
}

CommonBoundParams common_cdf_params(double t, double power_mW, std::span<const double> zeta, int nt,
                                    double epsilon) {
    const std::vector<double> eps(zeta.size(), epsilon);
    return common_cdf_params(t, power_mW, zeta, nt, eps);
}

double common_cdf(double y, const CommonBoundParams& p) {
    if (!(y >= 0.0)) throw DomainError("common_cdf: y must be nonnegative");
    if (std::isinf(y)) return 1.0;
    return 1.0 - std::exp(-p.c1 * y - p.d_int * std::log1p(p.c2 * y));
}

double expected_common_capacity(const CommonBoundParams& p, const NumericTolerances& tol) {
    if (!(p.c1 > 0.0) || !(p.c2 > 0.0) || p.d_int < 1)
        throw DomainError("expected_common_capacity: requires c1 > 0, c2 > 0, d >= 1");
    const int n = p.d_int;
    const double x = p.c1 / p.c2;
    const double a = 1.0 - p.c2;
    // J = ln2 * E[C] = integral of e^{-c1 y} / ((1 + c2 y)^n (1 + y)).
    double j = 0.0;
    if (a == 0.0 || n * std::log(std::abs(a)) < std::log(1e-4)) {
        // Exact expansion of 1/(u - a) in powers of a/u after u = 1 + c2 y.
        double apow = 1.0;
        int m = 0;
        for (;; ++m) {
            const double term = apow * exp_integral_scaled(n + 1 + m, x, tol);
            j += term;
            if (std::abs(term) <= 1e-17 * std::abs(j) || apow == 0.0) break;
            if (m > 100000) throw NumericError("expected_common_capacity: series did not converge");
            apow *= a;
        }
    } else {
        double acc = exp_integral_scaled(1, p.c1, tol);
        double apow = 1.0;
        for (int i = 1; i <= n; ++i) {
            acc -= apow * exp_integral_scaled(i, x, tol);
            apow *= a;
        }
        j = acc / std::pow(a, n);
    }
    return std::max(0.0, j) / std::numbers::ln2;
}

double expected_common_sinr(const CommonBoundParams& p, const NumericTolerances& tol) {
    if (!(p.c1 > 0.0) || !(p.c2 >= 0.0) || p.d_int < 1)
        throw DomainError("expected_common_sinr: requires c1 > 0, c2 >= 0, d >= 1");
    if (p.c2 == 0.0) return 1.0 / p.c1;
    const double x = p.c1 / p.c2;
    if (!std::isfinite(x)) return 1.0 / p.c1;
    return exp_integral_scaled(p.d_int, x, tol) / p.c2;
}

XkParams private_xk_params(std::span<const double> mu, double epsilon, int nt, int k) {
    check_user(mu, k);
    const int users = static_cast<int>(mu.size());
    if (nt < users) throw DomainError("private_xk_params: need Nt >= K");
    const double e2 = epsilon * epsilon;
    const double m = nt - users + 1;
    const double mk = mu[k];
    const double sum_sq = sum_squares_except(mu, -1);
    const double num = m * e2 * mk + (1.0 - e2);
    const double den = m * e2 * e2 * mk * mk + (1.0 - e2) * (1.0 - e2) * sum_sq;
    if (!(num > 0.0) || !(den > 0.0))
        throw DomainError("private_xk_params: signal term vanishes (mu_k = 0 with perfect CSI)");
    XkParams out;
    out.gamma = {num * num / den, den / num};
    out.alpha = std::log(out.gamma.scale) + digamma(out.gamma.shape);
    return out;
}

YkParams private_yk_params(std::span<const double> mu, double epsilon, int k) {
    check_user(mu, k);
    const double e2 = epsilon * epsilon;
    const double mk = mu[k];
    const double s = sum_squares_except(mu, k);
    YkParams y;
    y.eta = (1.0 - e2) * (1.0 - mk);
    if (s > 0.0 && mk < 1.0) {
        y.shape = (1.0 - mk) * (1.0 - mk) / s;
        y.scale = (1.0 - e2) * s / (1.0 - mk);
    }
    y.interference_free = !(y.eta > 0.0);
    return y;
}

GammaParams private_mk_params(double epsilon, int nt, int num_users) {
    if (num_users < 1 || nt < num_users) throw DomainError("private_mk_params: need Nt >= K >= 1");
    const double e2 = epsilon * epsilon;
    const double m = nt - num_users + 1;
    const double num = m * e2 + 1.0 - e2;
    const double den = m * e2 * e2 + (1.0 - e2) * (1.0 - e2);
    return {num * num / den, den / num};
}

BoundEvaluator::BoundEvaluator(const SystemConfig& config, const DerivedLink& link, NumericTolerances tol)
    : nt_(config.num_tx_antennas),
      k_(config.num_users),
      power_(link.tx_power_mW),
      zeta_(link.zeta),
      eps_(link.epsilon),
      tol_(tol) {
    config.validate();
    tol_.validate();
    if (link.users() != k_) throw DomainError("BoundEvaluator: link and config disagree on K");
    double worst = 0.0;
    for (double b : config.bler_common) worst = std::max(worst, gauss_q_inv(b, tol_));
    common_penalty_ = worst / std::sqrt(static_cast<double>(config.blocklength_common));
    for (int k = 0; k < k_; ++k)
        private_penalty_.push_back(gauss_q_inv(config.bler_private[k], tol_) /
                                   std::sqrt(static_cast<double>(config.blocklength_private[k])));
}

CommonBoundParams BoundEvaluator::common_params(double t) const {
    return common_cdf_params(std::clamp(t, kTMin, kTMax), power_, zeta_, nt_, eps_);
}

double BoundEvaluator::common(double t) const {
    if (t >= 1.0) return 0.0;
    const CommonBoundParams p = common_params(t);
    const double capacity = expected_common_capacity(p, tol_);
    const double mean = expected_common_sinr(p, tol_);
    return std::max(0.0, capacity - std::sqrt(channel_dispersion(mean)) * common_penalty_);
}

PrivateBoundParams BoundEvaluator::private_params(double t, std::span<const double> mu, int k) const {
    check_user(mu, k);
    if (static_cast<int>(mu.size()) != k_) throw DomainError("private_params: mu must have K entries");
    const double eps = eps_[k];
    PrivateBoundParams out;
    out.m = private_mk_params(eps, nt_, k_);
    const double mk = mu[k];
    const double snr = power_ * t * zeta_[k];
    out.ck1 = mk > 0.0 ? 1.0 / (snr * mk * out.m.mean()) : std::numeric_limits<double>::infinity();
    out.ck2 = k_ > 1 && mk > 0.0 ? (1.0 - mk) * (1.0 - eps * eps) / ((k_ - 1) * mk * out.m.mean()) : 0.0;
    const YkParams y = private_yk_params(mu, eps, k);
    out.eta = y.eta;
    if (mk > 0.0 || eps < 1.0) out.alpha = private_xk_params(mu, eps, nt_, k).alpha;
    return out;
}

double BoundEvaluator::private_sinr_mean(double t, std::span<const double> mu, int k) const {
    check_user(mu, k);
    if (!(t > 0.0) || !(mu[k] > 0.0)) return 0.0;
    t = std::clamp(t, kTMin, 1.0);
    const PrivateBoundParams p = private_params(t, mu, k);
    if (!(p.ck2 > 0.0)) return 1.0 / p.ck1;
    const double x = p.ck1 / p.ck2;
    if (!std::isfinite(x)) return 1.0 / p.ck1;
    return exp_integral_scaled(k_ - 1, x, tol_) / p.ck2;
}

double BoundEvaluator::private_unclamped(double t, std::span<const double> mu, int k) const {
    check_user(mu, k);
    if (!(t > 0.0)) return 0.0;
    if (!(mu[k] > 0.0) && eps_[k] >= 1.0) return 0.0;
    t = std::clamp(t, kTMin, 1.0);
    const PrivateBoundParams p = private_params(t, mu, k);
    const double snr = power_ * t * zeta_[k];
    const double capacity = std::log2(1.0 + snr * std::exp(p.alpha)) - std::log2(1.0 + snr * p.eta);
    const double mean = private_sinr_mean(t, mu, k);
    return capacity - std::sqrt(channel_dispersion(mean)) * private_penalty_[k];
}

double BoundEvaluator::private_rate(double t, std::span<const double> mu, int k) const {
    check_user(mu, k);
    if (!(mu[k] > 0.0)) return 0.0;
    return std::max(0.0, private_unclamped(t, mu, k));
}

std::vector<double> BoundEvaluator::private_rates(double t, std::span<const double> mu) const {
    std::vector<double> r(static_cast<std::size_t>(k_));
    for (int k = 0; k < k_; ++k) r[k] = private_rate(t, mu, k);
    return r;
}

double BoundEvaluator::private_sum(double t, std::span<const double> mu) const {
    double s = 0.0;
    for (int k = 0; k < k_; ++k) s += private_rate(t, mu, k);
    return s;
}

double BoundEvaluator::sum(double t, std::span<const double> mu) const { return common(t) + private_sum(t, mu); }

double common_rate_lower_bound(double t, const SystemConfig& config, const DerivedLink& link) {
    return BoundEvaluator(config, link).common(t);
}

double private_sinr_mean(double t, std::span<const double> mu, const SystemConfig& config, const DerivedLink& link,
                         int k) {
    return BoundEvaluator(config, link).private_sinr_mean(t, mu, k);
}

double private_rate_lower_bound(double t, std::span<const double> mu, const SystemConfig& config,
                                const DerivedLink& link, int k) {
    return BoundEvaluator(config, link).private_rate(t, mu, k);
}

double bound_sum_rate(double t, std::span<const double> mu, const SystemConfig& config, const DerivedLink& link) {
    return BoundEvaluator(config, link).sum(t, mu);
}

}  // namespace rsma
