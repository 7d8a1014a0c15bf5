// SPDX-License-Identifier: Apache-2.0
//
// Exception types shared by the rsma-fbl library.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rsma {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Parameters sit on a removable singularity of a closed form (t in {0,1}, C2 = 1).
class SingularParameterError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Channel matrix too ill-conditioned for zero-forcing.
class ConditioningError : public std::runtime_error {
public:
    ConditioningError(const std::string& what, double reciprocal_condition)
        : std::runtime_error(what), rcond_(reciprocal_condition) {}
    double reciprocal_condition() const noexcept { return rcond_; }

private:
    double rcond_;
};

/// Iterative numerical routine failed to converge.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid scenario, sweep specification, or CLI input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exhaustive search would exceed its evaluation budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No point satisfies the constraints (QoS unreachable, inconsistent QP).
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, std::vector<int> violated = {})
        : std::runtime_error(what), violated_(std::move(violated)) {}
    const std::vector<int>& violated_users() const noexcept { return violated_; }

private:
    std::vector<int> violated_;
};

}  // namespace rsma
