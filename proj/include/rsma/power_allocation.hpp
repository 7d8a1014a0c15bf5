// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace rsma {

/// Decision variables: private power fraction t, private split mu on the
/// simplex, and the per-user shares c of the common rate.
struct PowerAllocation {
    double t = 1.0;
    std::vector<double> mu;
    std::vector<double> c;

    static PowerAllocation uniform(int k, double t = 1.0) {
        PowerAllocation a;
        a.t = t;
        a.mu.assign(static_cast<std::size_t>(k), 1.0 / k);
        a.c.assign(static_cast<std::size_t>(k), 0.0);
        return a;
    }

    /// Throws DomainError when t leaves [0,1], mu leaves the simplex by more
    /// than tol, or some c_k is negative.
    void validate(double tol = 1e-9) const;
};

}  // namespace rsma
