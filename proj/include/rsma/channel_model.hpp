// SPDX-License-Identifier: Apache-2.0
//
// Scenario description, delayed-CSI Rayleigh channel draws, precoders,
// per-stream SINRs and the finite-blocklength instantaneous rate.
//
// Powers are in milliwatts throughout; zeta is the large-scale gain
// normalized by the noise power, so P[mW] * zeta is a dimensionless SNR.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rsma {

enum class CommonPrecoderMode { isotropic_random, dominant_left_singular };

struct SystemConfig {
    int num_tx_antennas = 8;
    int num_users = 4;
    double tx_power_dBm = 35.0;
    double carrier_freq_Hz = 5.9e9;
    double bandwidth_Hz = 10e6;
    double noise_density_dBm_per_Hz = -174.0;
    double csi_delay_s = 0.4e-3;
    int blocklength_common = 300;
    std::vector<int> blocklength_private;
    std::vector<double> bler_common;
    std::vector<double> bler_private;
    std::vector<double> velocities_kmh;
    std::vector<double> distances_m;
    double pathloss_ref_dB = -30.0;
    double pathloss_exponent = 3.7;
    double ref_distance_m = 1.0;
    double qos_min_rate = 0.1;
    CommonPrecoderMode common_precoder_mode = CommonPrecoderMode::dominant_left_singular;
    std::uint64_t rng_seed = 1;

    /// Nt=8, K=4, 35 dBm, 5.9 GHz, 10 MHz, -174 dBm/Hz, T=0.4 ms, l=300,
    /// BLER 1e-6, 110 km/h, distances drawn uniformly in [100, 300] m.
    static SystemConfig defaults(std::uint64_t seed = 1);

    /// Throws ConfigError naming the first offending field.
    void validate() const;
};

/// Draws any missing per-user distances uniformly in [100, 300] m from the seed.
void resolve_distances(SystemConfig& config);

/// Per-user link quantities derived from a validated configuration.
struct DerivedLink {
    std::vector<double> epsilon;  ///< CSI time correlation per user, in [0,1]
    std::vector<double> zeta;     ///< large-scale gain over noise power, per mW
    double tx_power_mW = 0.0;
    double noise_power_mW = 0.0;

    int users() const { return static_cast<int>(zeta.size()); }
};

inline constexpr double kSpeedOfLight = 3e8;

/// epsilon = J0(2 pi f_D T) with f_D = v f_c / c, clamped to [0, 1].
double time_correlation(double velocity_kmh, double carrier_freq_Hz, double delay_s);

/// Noise power sigma^2 = N0 * B in mW.
double noise_power_mW(const SystemConfig& config);

/// zeta = 10^{L(d)/10} / sigma^2 with L(d) = rho0 - 10 alpha0 lg(d/d0).
double large_scale_gain(double distance_m, const SystemConfig& config);

DerivedLink derive_link(const SystemConfig& config);

struct ChannelRealization {
    Eigen::MatrixXcd h_prev;             ///< Nt x K, CSI available at the transmitter
    Eigen::MatrixXcd h_curr;             ///< Nt x K, channel during transmission
    Eigen::VectorXcd precoder_common;    ///< unit norm
    Eigen::MatrixXcd precoders_private;  ///< Nt x K, unit-norm columns
    int resamples = 0;                   ///< ill-conditioned draws discarded
};

/// Zero-forcing precoders: normalized columns of H (H^H H)^{-1}.
/// Throws ConditioningError when rcond(H^H H) < 1e-10.
Eigen::MatrixXcd zf_precoders(const Eigen::MatrixXcd& h_prev);

/// Dominant left singular vector by power iteration on H^H H (tolerance 1e-10,
/// at most 10^4 steps; NumericError otherwise).
Eigen::VectorXcd dominant_left_singular_vector(const Eigen::MatrixXcd& h);

/// Common precoder. The isotropic mode normalizes `gaussian_draw`, which must
/// be an i.i.d. CN(0,1) vector independent of h_prev.
Eigen::VectorXcd common_precoder(const Eigen::MatrixXcd& h_prev, CommonPrecoderMode mode,
                                 const Eigen::VectorXcd& gaussian_draw);

/// One Monte Carlo trial; deterministic in (seed, trial).
ChannelRealization draw_realization(const SystemConfig& config, const DerivedLink& link,
                                    std::uint64_t seed, std::uint64_t trial);

/// |h_k^H p_c|^2 and |h_k^H p_j|^2 at the transmission instant.
struct TrialGains {
    std::vector<double> common;   ///< K
    std::vector<double> priv;     ///< K x K row-major, [k*K + j]
};

TrialGains compute_gains(const ChannelRealization& realization);

/// Gamma_{c,k} for all users from precomputed gains.
void sinr_common_from_gains(std::span<const double> common_gain, std::span<const double> private_gain,
                            std::span<const double> zeta, double t, std::span<const double> mu,
                            double power_mW, std::span<double> out);

/// Gamma_{p,k} for all users from precomputed gains.
void sinr_private_from_gains(std::span<const double> private_gain, std::span<const double> zeta, double t,
                             std::span<const double> mu, double power_mW, std::span<double> out);

std::vector<double> sinr_common(const ChannelRealization& realization, const DerivedLink& link, double t,
                                std::span<const double> mu, double power_mW);

std::vector<double> sinr_private(const ChannelRealization& realization, const DerivedLink& link, double t,
                                 std::span<const double> mu, double power_mW);

struct FblRateInputs {
    double sinr = 0.0;
    int blocklength = 1;
    double bler = 1e-6;

    void validate() const;
};

/// max(0, log2(1+G) - sqrt(V(G)/l) Q^{-1}(beta)).
double fbl_rate(const FblRateInputs& inputs);

/// Kernel form with the dispersion factor Q^{-1}(beta)/sqrt(l) precomputed.
inline double fbl_rate_fast(double sinr, double penalty_factor) noexcept;

}  // namespace rsma

#include <cmath>

namespace rsma {

inline double fbl_rate_fast(double sinr, double penalty_factor) noexcept {
    constexpr double kL2e = 1.44269504088896340736;
    const double inv = 1.0 / (1.0 + sinr);
    const double rate = std::log2(1.0 + sinr) - std::sqrt(1.0 - inv * inv) * kL2e * penalty_factor;
    return rate > 0.0 ? rate : 0.0;
}

}  // namespace rsma
