// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random streams: every (seed, index, domain) triple owns an
// independent engine, so trials can be generated in any order or on any
// number of threads and still reproduce bit-identical draws.

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace rsma {

/// Stream domains keep unrelated consumers of one seed apart.
enum class StreamDomain : std::uint32_t {
    channel = 0,
    placement = 1,
    simplex_draw = 2,
    coarse_search = 3,
};

class TrialStream {
public:
    TrialStream(std::uint64_t seed, std::uint64_t index, StreamDomain domain = StreamDomain::channel) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                          static_cast<std::uint32_t>(domain)};
        engine_.seed(seq);
    }

    /// Circularly symmetric complex Gaussian with unit variance.
    std::complex<double> cn01() {
        constexpr double kHalfStd = 0.70710678118654752440;
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {kHalfStd * re, kHalfStd * im};
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

    double exponential() { return std::exponential_distribution<double>(1.0)(engine_); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rsma
