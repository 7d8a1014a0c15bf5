// SPDX-License-Identifier: Apache-2.0
//
// Local SQP search for small smooth problems:
//
//   minimize f(x)  s.t.  h_i(x) = 0,  g_j(x) >= 0,  lower <= x <= upper
//
// Gradients by finite differences, damped BFGS curvature starting from the
// identity, an L1 merit function with Armijo backtracking, and a constraint
// relaxation fallback when the linearized subproblem is inconsistent.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rsma {

using ScalarFunction = std::function<double(const Eigen::VectorXd&)>;

struct SearchProblem {
    ScalarFunction objective;
    std::vector<ScalarFunction> equalities;
    std::vector<ScalarFunction> inequalities;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

struct SearchSettings {
    int max_iterations = 50;
    double gradient_step = 1e-5;     ///< relative finite-difference step
    double convergence_tol = 1e-6;   ///< objective change
    double constraint_tol = 1e-8;
    double kkt_tol = 1e-4;

    void validate() const;
};

struct SearchResult {
    Eigen::VectorXd x;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    bool feasible = false;
    bool restoration_used = false;  ///< a relaxed subproblem was needed at some iterate
    std::vector<double> merit_trace;      ///< L1 merit at each accepted iterate, x0 first
    std::vector<double> objective_trace;  ///< f at each accepted iterate, x0 first
    std::vector<double> equality_residuals;
    std::vector<double> inequality_residuals;  ///< max(0, -g_j(x))
    double kkt_residual = 0.0;
    std::string status;
};

/// Central differences with one-sided steps at the box bounds.
Eigen::VectorXd finite_difference_gradient(const ScalarFunction& f, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                           double relative_step);

/// Deterministic in its inputs. x0 is projected onto the box first.
SearchResult constrained_local_search(const SearchProblem& problem, const Eigen::VectorXd& x0,
                                      const SearchSettings& settings = {});

}  // namespace rsma
