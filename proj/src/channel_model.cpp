// SPDX-License-Identifier: Apache-2.0

#include "rsma/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rsma/errors.hpp"
#include "rsma/rng.hpp"
#include "rsma/special_functions.hpp"

namespace rsma {

namespace {

constexpr double kMinRcond = 1e-10;
constexpr int kMaxResamples = 1000;

template <typename T>
void require_length(const std::vector<T>& v, int k, const char* field) {
    if (static_cast<int>(v.size()) != k)
        throw ConfigError(std::string(field) + ": expected " + std::to_string(k) + " entries, got " +
                          std::to_string(v.size()));
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

}  // namespace

SystemConfig SystemConfig::defaults(std::uint64_t seed) {
    SystemConfig c;
    c.rng_seed = seed;
    const auto k = static_cast<std::size_t>(c.num_users);
    c.blocklength_private.assign(k, 300);
    c.bler_common.assign(k, 1e-6);
    c.bler_private.assign(k, 1e-6);
    c.velocities_kmh.assign(k, 110.0);
    resolve_distances(c);
    return c;
}

void SystemConfig::validate() const {
    require(num_users >= 1, "num_users: must be >= 1");
    require(num_tx_antennas >= num_users, "num_tx_antennas: must be >= num_users");
    require(std::isfinite(tx_power_dBm), "tx_power_dBm: must be finite");
    require(carrier_freq_Hz > 0.0 && std::isfinite(carrier_freq_Hz), "carrier_freq_Hz: must be positive");
    require(bandwidth_Hz > 0.0 && std::isfinite(bandwidth_Hz), "bandwidth_Hz: must be positive");
    require(std::isfinite(noise_density_dBm_per_Hz), "noise_density_dBm_per_Hz: must be finite");
    require(csi_delay_s > 0.0 && std::isfinite(csi_delay_s), "csi_delay_s: must be positive");
    require(blocklength_common >= 1, "blocklength_common: must be >= 1");
    require_length(blocklength_private, num_users, "blocklength_private");
    require_length(bler_common, num_users, "bler_common");
    require_length(bler_private, num_users, "bler_private");
    require_length(velocities_kmh, num_users, "velocities_kmh");
    require_length(distances_m, num_users, "distances_m");
    for (int k = 0; k < num_users; ++k) {
        const std::string idx = "[" + std::to_string(k) + "]";
        require(blocklength_private[k] >= 1, "blocklength_private" + idx + ": must be >= 1");
        require(bler_common[k] > 0.0 && bler_common[k] < 0.5, "bler_common" + idx + ": must lie in (0, 0.5)");
        require(bler_private[k] > 0.0 && bler_private[k] < 0.5, "bler_private" + idx + ": must lie in (0, 0.5)");
        require(velocities_kmh[k] >= 0.0 && std::isfinite(velocities_kmh[k]),
                "velocities_kmh" + idx + ": must be >= 0");
        require(distances_m[k] > 0.0 && std::isfinite(distances_m[k]), "distances_m" + idx + ": must be > 0");
    }
    require(std::isfinite(pathloss_ref_dB), "pathloss_ref_dB: must be finite");
    require(std::isfinite(pathloss_exponent), "pathloss_exponent: must be finite");
    require(ref_distance_m > 0.0, "ref_distance_m: must be > 0");
    require(qos_min_rate >= 0.0 && std::isfinite(qos_min_rate), "qos_min_rate: must be >= 0");
}

void resolve_distances(SystemConfig& config) {
    if (!config.distances_m.empty()) return;
    TrialStream stream(config.rng_seed, 0, StreamDomain::placement);
    config.distances_m.resize(static_cast<std::size_t>(std::max(config.num_users, 0)));
    for (double& d : config.distances_m) d = stream.uniform(100.0, 300.0);
}

double time_correlation(double velocity_kmh, double carrier_freq_Hz, double delay_s) {
    if (!(velocity_kmh >= 0.0) || !(carrier_freq_Hz > 0.0) || !(delay_s > 0.0))
        throw DomainError("time_correlation: requires v >= 0, f_c > 0, T > 0");
    const double doppler = (velocity_kmh / 3.6) * carrier_freq_Hz / kSpeedOfLight;
    const double eps = bessel_j0(2.0 * std::numbers::pi * doppler * delay_s);
    return std::clamp(eps, 0.0, 1.0);
}

double noise_power_mW(const SystemConfig& config) {
    return std::pow(10.0, (config.noise_density_dBm_per_Hz + 10.0 * std::log10(config.bandwidth_Hz)) / 10.0);
}

double large_scale_gain(double distance_m, const SystemConfig& config) {
    if (!(distance_m > 0.0)) throw DomainError("large_scale_gain: distance must be positive");
    const double loss_dB =
        config.pathloss_ref_dB - 10.0 * config.pathloss_exponent * std::log10(distance_m / config.ref_distance_m);
    return std::pow(10.0, loss_dB / 10.0) / noise_power_mW(config);
}

DerivedLink derive_link(const SystemConfig& config) {
    config.validate();
    DerivedLink link;
    link.tx_power_mW = std::pow(10.0, config.tx_power_dBm / 10.0);
    link.noise_power_mW = noise_power_mW(config);
    for (int k = 0; k < config.num_users; ++k) {
        link.epsilon.push_back(time_correlation(config.velocities_kmh[k], config.carrier_freq_Hz, config.csi_delay_s));
        link.zeta.push_back(large_scale_gain(config.distances_m[k], config));
    }
    return link;
}

Eigen::MatrixXcd zf_precoders(const Eigen::MatrixXcd& h_prev) {
    const Eigen::Index k = h_prev.cols();
    if (k == 0 || h_prev.rows() < k) throw DomainError("zf_precoders: need Nt >= K >= 1");
    const Eigen::MatrixXcd gram = h_prev.adjoint() * h_prev;
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
    if (!(rcond >= kMinRcond))
        throw ConditioningError("zf_precoders: Gram matrix rcond " + std::to_string(rcond) + " below 1e-10", rcond);
    Eigen::MatrixXcd w = h_prev * llt.solve(Eigen::MatrixXcd::Identity(k, k));
    w.colwise().normalize();
    return w;
}

Eigen::VectorXcd dominant_left_singular_vector(const Eigen::MatrixXcd& h) {
    const Eigen::Index k = h.cols();
    if (k == 0) throw DomainError("dominant_left_singular_vector: empty matrix");
    if (k == 1) {
        const double n = h.col(0).norm();
        if (!(n > 0.0)) throw NumericError("dominant_left_singular_vector: zero matrix");
        return h.col(0) / n;
    }
    // Power iteration on a few squarings of the K x K Gram matrix; squaring
    // raises the eigenvalue ratio so near-degenerate draws still converge.
    Eigen::MatrixXcd g = h.adjoint() * h;
    for (int s = 0; s < 4; ++s) {
        g = g * g;
        const double scale = g.norm();
        if (!(scale > 0.0) || !std::isfinite(scale)) throw NumericError("dominant_left_singular_vector: degenerate Gram");
        g /= scale;
    }
    Eigen::VectorXcd v(k);
    for (Eigen::Index i = 0; i < k; ++i) v(i) = 1.0 + 0.1 * static_cast<double>(i);
    v.normalize();
    bool converged = false;
    for (int it = 0; it < 10000; ++it) {
        Eigen::VectorXcd next = g * v;
        const double n = next.norm();
        if (!(n > 0.0)) throw NumericError("dominant_left_singular_vector: iterate collapsed");
        next /= n;
        const double change = (next - v).norm();
        v = next;
        if (change < 1e-10) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NumericError("dominant_left_singular_vector: no convergence after 1e4 steps");
    Eigen::VectorXcd u = h * v;
    return u / u.norm();
}

Eigen::VectorXcd common_precoder(const Eigen::MatrixXcd& h_prev, CommonPrecoderMode mode,
                                 const Eigen::VectorXcd& gaussian_draw) {
    if (mode == CommonPrecoderMode::dominant_left_singular) return dominant_left_singular_vector(h_prev);
    if (gaussian_draw.size() != h_prev.rows()) throw DomainError("common_precoder: draw length must equal Nt");
    const double n = gaussian_draw.norm();
    if (!(n > 0.0)) throw NumericError("common_precoder: zero isotropic draw");
    return gaussian_draw / n;
}

ChannelRealization draw_realization(const SystemConfig& config, const DerivedLink& link, std::uint64_t seed,
                                    std::uint64_t trial) {
    const int nt = config.num_tx_antennas;
    const int k = config.num_users;
    if (link.users() != k) throw DomainError("draw_realization: link and config disagree on K");
    TrialStream stream(seed, trial);
    ChannelRealization r;
    r.h_prev.resize(nt, k);
    r.h_curr.resize(nt, k);
    Eigen::VectorXcd iso(nt);
    for (int attempt = 0;; ++attempt) {
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < nt; ++i) r.h_prev(i, j) = stream.cn01();
        for (int j = 0; j < k; ++j) {
            const double e = link.epsilon[j];
            const double s = std::sqrt(std::max(0.0, 1.0 - e * e));
            for (int i = 0; i < nt; ++i) r.h_curr(i, j) = e * r.h_prev(i, j) + s * stream.cn01();
        }
        // Drawn unconditionally so both precoder modes see the same channel stream.
        for (int i = 0; i < nt; ++i) iso(i) = stream.cn01();
        try {
            r.precoders_private = zf_precoders(r.h_prev);
            r.precoder_common = common_precoder(r.h_prev, config.common_precoder_mode, iso);
            r.resamples = attempt;
            return r;
        } catch (const ConditioningError&) {
            if (attempt >= kMaxResamples) throw;
        } catch (const NumericError&) {
            if (attempt >= kMaxResamples) throw;
        }
    }
}

TrialGains compute_gains(const ChannelRealization& realization) {
    const Eigen::Index k = realization.h_curr.cols();
    TrialGains g;
    g.common.resize(static_cast<std::size_t>(k));
    g.priv.resize(static_cast<std::size_t>(k * k));
    const Eigen::MatrixXcd proj = realization.h_curr.adjoint() * realization.precoders_private;
    const Eigen::VectorXcd projc = realization.h_curr.adjoint() * realization.precoder_common;
    for (Eigen::Index i = 0; i < k; ++i) {
        g.common[static_cast<std::size_t>(i)] = std::norm(projc(i));
        for (Eigen::Index j = 0; j < k; ++j) g.priv[static_cast<std::size_t>(i * k + j)] = std::norm(proj(i, j));
    }
    return g;
}

void sinr_common_from_gains(std::span<const double> common_gain, std::span<const double> private_gain,
                            std::span<const double> zeta, double t, std::span<const double> mu, double power_mW,
                            std::span<double> out) {
    const std::size_t k = common_gain.size();
    for (std::size_t i = 0; i < k; ++i) {
        double interference = 0.0;
        for (std::size_t j = 0; j < k; ++j) interference += mu[j] * private_gain[i * k + j];
        const double snr = power_mW * zeta[i];
        out[i] = snr * (1.0 - t) * common_gain[i] / (snr * t * interference + 1.0);
    }
}

void sinr_private_from_gains(std::span<const double> private_gain, std::span<const double> zeta, double t,
                             std::span<const double> mu, double power_mW, std::span<double> out) {
    const std::size_t k = zeta.size();
    for (std::size_t i = 0; i < k; ++i) {
        double interference = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            if (j != i) interference += mu[j] * private_gain[i * k + j];
        const double snr = power_mW * zeta[i] * t;
        out[i] = snr * mu[i] * private_gain[i * k + i] / (snr * interference + 1.0);
    }
}

std::vector<double> sinr_common(const ChannelRealization& realization, const DerivedLink& link, double t,
                                std::span<const double> mu, double power_mW) {
    const TrialGains g = compute_gains(realization);
    std::vector<double> out(g.common.size());
    sinr_common_from_gains(g.common, g.priv, link.zeta, t, mu, power_mW, out);
    return out;
}

std::vector<double> sinr_private(const ChannelRealization& realization, const DerivedLink& link, double t,
                                 std::span<const double> mu, double power_mW) {
    const TrialGains g = compute_gains(realization);
    std::vector<double> out(g.common.size());
    sinr_private_from_gains(g.priv, link.zeta, t, mu, power_mW, out);
    return out;
}

void FblRateInputs::validate() const {
    if (!(sinr >= 0.0)) throw DomainError("fbl_rate: SINR must be nonnegative");
    if (blocklength < 1) throw DomainError("fbl_rate: blocklength must be >= 1");
    if (!(bler > 0.0 && bler < 0.5)) throw DomainError("fbl_rate: BLER must lie in (0, 0.5)");
}

double fbl_rate(const FblRateInputs& inputs) {
    inputs.validate();
    if (std::isinf(inputs.sinr)) return inputs.sinr;
    const double penalty =
        std::sqrt(channel_dispersion(inputs.sinr) / inputs.blocklength) * gauss_q_inv(inputs.bler);
    return std::max(0.0, std::log2(1.0 + inputs.sinr) - penalty);
}

}  // namespace rsma
