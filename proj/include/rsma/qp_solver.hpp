// SPDX-License-Identifier: Apache-2.0
//
// Dense strictly convex QP by the Goldfarb-Idnani dual active-set method:
//
//   minimize   0.5 x' G x + a' x
//   subject to Ce' x + ce = 0,  Ci' x + ci >= 0
//
// Constraint normals are the columns of Ce and Ci. Sized for the handful of
// variables in the allocation subproblems; the factorization of the active
// set is rebuilt from scratch after every change.

#pragma once

#include <vector>

#include <Eigen/Dense>

namespace rsma {

struct QpProblem {
    Eigen::MatrixXd G;
    Eigen::VectorXd a;
    Eigen::MatrixXd Ce;  ///< n x me
    Eigen::VectorXd ce;
    Eigen::MatrixXd Ci;  ///< n x mi
    Eigen::VectorXd ci;
};

struct QpSolution {
    Eigen::VectorXd x;
    double objective = 0.0;
    Eigen::VectorXd lambda_eq;    ///< multipliers, sign such that G x + a = Ce l_e + Ci l_i
    Eigen::VectorXd lambda_ineq;  ///< nonnegative
    std::vector<int> active;      ///< active inequality indices
    int iterations = 0;
};

/// Throws InfeasibleError when the constraints are inconsistent and
/// DomainError when G is not positive definite or shapes disagree.
QpSolution solve_qp(const QpProblem& problem);

}  // namespace rsma
