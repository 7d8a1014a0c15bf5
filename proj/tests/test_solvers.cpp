// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "rsma/constrained_search.hpp"
#include "rsma/errors.hpp"
#include "rsma/qp_solver.hpp"

using namespace rsma;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double qp_objective(const QpProblem& p, const VectorXd& x) { return 0.5 * x.dot(p.G * x) + p.a.dot(x); }

// Enumerates every subset of inequalities treated as active, solves the
// equality-constrained KKT system, and keeps the best feasible point with
// nonnegative multipliers. Exponential, fine for a handful of constraints.
double brute_force_qp(const QpProblem& p) {
    const int n = static_cast<int>(p.G.rows());
    const int me = static_cast<int>(p.Ce.cols());
    const int mi = static_cast<int>(p.Ci.cols());
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < (1 << mi); ++mask) {
        std::vector<int> act;
        for (int j = 0; j < mi; ++j)
            if (mask & (1 << j)) act.push_back(j);
        const int m = me + static_cast<int>(act.size());
        if (m > n) continue;
        MatrixXd kkt = MatrixXd::Zero(n + m, n + m);
        VectorXd rhs(n + m);
        kkt.topLeftCorner(n, n) = p.G;
        rhs.head(n) = -p.a;
        for (int i = 0; i < me; ++i) {
            kkt.block(0, n + i, n, 1) = -p.Ce.col(i);
            kkt.block(n + i, 0, 1, n) = p.Ce.col(i).transpose();
            rhs(n + i) = -p.ce(i);
        }
        for (std::size_t i = 0; i < act.size(); ++i) {
            const int r = n + me + static_cast<int>(i);
            kkt.block(0, r, n, 1) = -p.Ci.col(act[i]);
            kkt.block(r, 0, 1, n) = p.Ci.col(act[i]).transpose();
            rhs(r) = -p.ci(act[i]);
        }
        Eigen::FullPivLU<MatrixXd> lu(kkt);
        if (lu.rank() < n + m) continue;
        const VectorXd sol = lu.solve(rhs);
        const VectorXd x = sol.head(n);
        bool ok = true;
        for (std::size_t i = 0; i < act.size(); ++i)
            if (sol(n + me + static_cast<int>(i)) < -1e-9) ok = false;
        for (int j = 0; j < mi; ++j)
            if (p.Ci.col(j).dot(x) + p.ci(j) < -1e-9) ok = false;
        if (ok) best = std::min(best, qp_objective(p, x));
    }
    return best;
}

QpProblem random_qp(std::mt19937_64& rng, int n, int me, int mi) {
    std::normal_distribution<double> g(0.0, 1.0);
    QpProblem p;
    MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    p.G = a * a.transpose() + 0.5 * MatrixXd::Identity(n, n);
    p.a = VectorXd::NullaryExpr(n, [&](Eigen::Index) { return g(rng); });
    p.Ce = MatrixXd::NullaryExpr(n, me, [&](Eigen::Index, Eigen::Index) { return g(rng); });
    p.ce = VectorXd::NullaryExpr(me, [&](Eigen::Index) { return g(rng); });
    p.Ci = MatrixXd::NullaryExpr(n, mi, [&](Eigen::Index, Eigen::Index) { return g(rng); });
    // Keep the origin strictly feasible for the inequalities.
    p.ci = VectorXd::NullaryExpr(mi, [&](Eigen::Index) { return 0.1 + std::abs(g(rng)); });
    return p;
}

}  // namespace

TEST_CASE("QP without constraints is a linear solve") {
    QpProblem p;
    p.G = MatrixXd{{4.0, 1.0}, {1.0, 3.0}};
    p.a = VectorXd{{1.0, 2.0}};
    p.Ce.resize(2, 0);
    p.ce.resize(0);
    p.Ci.resize(2, 0);
    p.ci.resize(0);
    const QpSolution s = solve_qp(p);
    const VectorXd x = -p.G.ldlt().solve(p.a);
    CHECK((s.x - x).norm() < 1e-12);
    CHECK(s.objective == doctest::Approx(qp_objective(p, x)));
}

TEST_CASE("QP against active-set enumeration and KKT conditions") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + trial % 3;
        const int me = trial % 2;
        const int mi = 2 + trial % 4;
        const QpProblem p = random_qp(rng, n, me, mi);
        QpSolution s;
        try {
            s = solve_qp(p);
        } catch (const InfeasibleError&) {
            CHECK(brute_force_qp(p) == std::numeric_limits<double>::infinity());
            continue;
        }
        INFO("trial " << trial);
        const double ref = brute_force_qp(p);
        CHECK(s.objective == doctest::Approx(ref).epsilon(1e-8));
        // Stationarity, feasibility, dual sign, complementarity.
        VectorXd grad = p.G * s.x + p.a;
        if (me > 0) grad -= p.Ce * s.lambda_eq;
        grad -= p.Ci * s.lambda_ineq;
        CHECK(grad.norm() < 1e-8);
        if (me > 0) CHECK((p.Ce.transpose() * s.x + p.ce).norm() < 1e-9);
        for (int j = 0; j < mi; ++j) {
            const double slack = p.Ci.col(j).dot(s.x) + p.ci(j);
            CHECK(slack > -1e-9);
            CHECK(s.lambda_ineq(j) >= -1e-12);
            CHECK(std::abs(slack * s.lambda_ineq(j)) < 1e-8);
        }
    }
}

TEST_CASE("QP failure modes") {
    QpProblem p;
    p.G = MatrixXd::Identity(1, 1);
    p.a = VectorXd::Zero(1);
    p.Ce.resize(1, 0);
    p.ce.resize(0);
    // x >= 1 and -x >= 0 cannot both hold.
    p.Ci = MatrixXd{{1.0, -1.0}};
    p.ci = VectorXd{{-1.0, 0.0}};
    CHECK_THROWS_AS(solve_qp(p), InfeasibleError);

    QpProblem q;
    q.G = MatrixXd{{1.0, 0.0}, {0.0, -1.0}};
    q.a = VectorXd::Zero(2);
    q.Ce.resize(2, 0);
    q.ce.resize(0);
    q.Ci.resize(2, 0);
    q.ci.resize(0);
    CHECK_THROWS_AS(solve_qp(q), DomainError);
}

TEST_CASE("finite-difference gradient") {
    const ScalarFunction f = [](const VectorXd& x) { return std::sin(x(0)) * x(1) + x(1) * x(1) * x(1); };
    const VectorXd lo = VectorXd::Constant(2, -10.0);
    const VectorXd hi = VectorXd::Constant(2, 10.0);
    const VectorXd x{{0.7, -1.3}};
    const VectorXd g = finite_difference_gradient(f, x, lo, hi, 1e-6);
    CHECK(g(0) == doctest::Approx(std::cos(0.7) * -1.3).epsilon(1e-7));
    CHECK(g(1) == doctest::Approx(std::sin(0.7) + 3 * 1.69).epsilon(1e-7));
    // At a bound the step stays inside the box.
    const VectorXd tight_hi{{0.7, 10.0}};
    const ScalarFunction guarded = [](const VectorXd& y) {
        if (y(0) > 0.7) throw std::runtime_error("left the box");
        return y(0) * y(0);
    };
    CHECK(finite_difference_gradient(guarded, x, lo, tight_hi, 1e-6)(0) == doctest::Approx(1.4).epsilon(1e-5));
}

TEST_CASE("constrained search: projection onto a line") {
    SearchProblem p;
    p.objective = [](const VectorXd& x) { return (x(0) - 2) * (x(0) - 2) + (x(1) - 1) * (x(1) - 1); };
    p.equalities = {[](const VectorXd& x) { return x(0) + x(1) - 1.0; }};
    p.lower = VectorXd::Constant(2, -5.0);
    p.upper = VectorXd::Constant(2, 5.0);
    const SearchResult r = constrained_local_search(p, VectorXd::Zero(2));
    CHECK(r.converged);
    CHECK(r.feasible);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.x(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-5));
    CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("constrained search: active inequality and bounds") {
    SearchProblem p;
    p.objective = [](const VectorXd& x) { return x.squaredNorm(); };
    p.inequalities = {[](const VectorXd& x) { return x(0) + x(1) - 1.0; }};
    p.lower = VectorXd::Constant(2, 0.0);
    p.upper = VectorXd::Constant(2, 1.0);
    const SearchResult r = constrained_local_search(p, VectorXd{{1.0, 1.0}});
    CHECK(r.converged);
    CHECK(r.x(0) == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(r.x(1) == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(r.iterations <= 15);

    // Box-only problem with the optimum on a bound.
    SearchProblem b;
    b.objective = [](const VectorXd& x) { return (x(0) + 3.0) * (x(0) + 3.0); };
    b.lower = VectorXd::Constant(1, 0.0);
    b.upper = VectorXd::Constant(1, 1.0);
    const SearchResult rb = constrained_local_search(b, VectorXd::Constant(1, 0.5));
    CHECK(rb.x(0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("constrained search: nonlinear benchmark with known optimum") {
    // min x1 x4 (x1 + x2 + x3) + x3 s.t. x1 x2 x3 x4 >= 25, sum x^2 = 40, 1 <= x <= 5.
    SearchProblem p;
    p.objective = [](const VectorXd& x) { return x(0) * x(3) * (x(0) + x(1) + x(2)) + x(2); };
    p.inequalities = {[](const VectorXd& x) { return x(0) * x(1) * x(2) * x(3) - 25.0; }};
    p.equalities = {[](const VectorXd& x) { return x.squaredNorm() - 40.0; }};
    p.lower = VectorXd::Constant(4, 1.0);
    p.upper = VectorXd::Constant(4, 5.0);
    SearchSettings s;
    s.max_iterations = 100;
    const SearchResult r = constrained_local_search(p, VectorXd{{1.0, 5.0, 5.0, 1.0}}, s);
    CHECK(r.feasible);
    CHECK(r.objective == doctest::Approx(17.0140173).epsilon(1e-5));
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.x(1) == doctest::Approx(4.7429994).epsilon(1e-4));
    CHECK(r.x(2) == doctest::Approx(3.8211503).epsilon(1e-4));
    CHECK(r.x(3) == doctest::Approx(1.3794082).epsilon(1e-4));
    REQUIRE(!r.merit_trace.empty());
    CHECK(r.objective_trace.size() == r.merit_trace.size());
}

TEST_CASE("constrained search: entropy on the simplex") {
    SearchProblem p;
    p.objective = [](const VectorXd& x) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) s += x(i) * std::log(x(i));
        return s;
    };
    p.equalities = {[](const VectorXd& x) { return x.sum() - 1.0; }};
    p.lower = VectorXd::Constant(4, 1e-6);
    p.upper = VectorXd::Constant(4, 1.0);
    const SearchResult r = constrained_local_search(p, VectorXd{{0.7, 0.1, 0.1, 0.1}});
    CHECK(r.converged);
    for (int i = 0; i < 4; ++i) CHECK(r.x(i) == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(std::abs(r.x.sum() - 1.0) < 1e-8);
    // L1 merit never increases along accepted steps.
    for (std::size_t i = 1; i < r.merit_trace.size(); ++i)
        CHECK(r.merit_trace[i] <= r.merit_trace[i - 1] + 1e-12);
}

TEST_CASE("search settings validation") {
    SearchSettings s;
    CHECK_NOTHROW(s.validate());
    s.max_iterations = 0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = {};
    s.gradient_step = -1.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
}
