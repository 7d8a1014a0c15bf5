// SPDX-License-Identifier: Apache-2.0

#include "rsma/constrained_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rsma/errors.hpp"
#include "rsma/qp_solver.hpp"

namespace rsma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelaxation[] = {1.0, 0.5, 0.1, 0.0};

struct Point {
    Eigen::VectorXd x;
    double f = 0.0;
    Eigen::VectorXd h;
    Eigen::VectorXd g;
    Eigen::VectorXd grad;
    Eigen::MatrixXd jh;  ///< me x n
    Eigen::MatrixXd jg;  ///< mi x n

    double violation() const {
        double v = h.cwiseAbs().sum();
        for (Eigen::Index j = 0; j < g.size(); ++j) v += std::max(0.0, -g(j));
        return v;
    }
    double max_violation() const {
        double v = h.size() ? h.cwiseAbs().maxCoeff() : 0.0;
        for (Eigen::Index j = 0; j < g.size(); ++j) v = std::max(v, -g(j));
        return v;
    }
};

class Evaluator {
public:
    Evaluator(const SearchProblem& p, const SearchSettings& s) : p_(p), s_(s) {}

    Point values(const Eigen::VectorXd& x) const {
        Point pt;
        pt.x = x;
        pt.f = p_.objective(x);
        pt.h.resize(static_cast<Eigen::Index>(p_.equalities.size()));
        pt.g.resize(static_cast<Eigen::Index>(p_.inequalities.size()));
        for (std::size_t i = 0; i < p_.equalities.size(); ++i) pt.h(static_cast<Eigen::Index>(i)) = p_.equalities[i](x);
        for (std::size_t j = 0; j < p_.inequalities.size(); ++j)
            pt.g(static_cast<Eigen::Index>(j)) = p_.inequalities[j](x);
        if (!std::isfinite(pt.f) || !pt.h.allFinite() || !pt.g.allFinite())
            throw NumericError("constrained_local_search: non-finite objective or constraint");
        return pt;
    }

    void gradients(Point& pt) const {
        const Eigen::Index n = pt.x.size();
        pt.grad = finite_difference_gradient(p_.objective, pt.x, p_.lower, p_.upper, s_.gradient_step);
        pt.jh.resize(pt.h.size(), n);
        pt.jg.resize(pt.g.size(), n);
        for (std::size_t i = 0; i < p_.equalities.size(); ++i)
            pt.jh.row(static_cast<Eigen::Index>(i)) =
                finite_difference_gradient(p_.equalities[i], pt.x, p_.lower, p_.upper, s_.gradient_step).transpose();
        for (std::size_t j = 0; j < p_.inequalities.size(); ++j)
            pt.jg.row(static_cast<Eigen::Index>(j)) =
                finite_difference_gradient(p_.inequalities[j], pt.x, p_.lower, p_.upper, s_.gradient_step)
                    .transpose();
    }

private:
    const SearchProblem& p_;
    const SearchSettings& s_;
};

Eigen::VectorXd clamp_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

void SearchSettings::validate() const {
    if (max_iterations < 1 || !(gradient_step > 0.0) || !(convergence_tol > 0.0) || !(constraint_tol > 0.0) ||
        !(kkt_tol > 0.0))
        throw DomainError("SearchSettings: all settings must be positive");
}

Eigen::VectorXd finite_difference_gradient(const ScalarFunction& f, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                           double relative_step) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd grad(n);
    Eigen::VectorXd probe = x;
    double f0 = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = relative_step * std::max(1.0, std::abs(x(i)));
        const bool room_below = x(i) - h >= lower(i);
        const bool room_above = x(i) + h <= upper(i);
        if (room_below && room_above) {
            probe(i) = x(i) + h;
            const double fp = f(probe);
            probe(i) = x(i) - h;
            const double fm = f(probe);
            grad(i) = (fp - fm) / (2.0 * h);
        } else {
            if (std::isnan(f0)) f0 = f(x);
            if (room_above || !room_below) {
                probe(i) = x(i) + h;
                grad(i) = (f(probe) - f0) / h;
            } else {
                probe(i) = x(i) - h;
                grad(i) = (f0 - f(probe)) / h;
            }
        }
        probe(i) = x(i);
    }
    return grad;
}

SearchResult constrained_local_search(const SearchProblem& problem, const Eigen::VectorXd& x0,
                                      const SearchSettings& settings) {
    settings.validate();
    if (!problem.objective) throw DomainError("constrained_local_search: objective is required");
    const Eigen::Index n = x0.size();
    SearchProblem p = problem;
    if (p.lower.size() == 0) p.lower = Eigen::VectorXd::Constant(n, -kInf);
    if (p.upper.size() == 0) p.upper = Eigen::VectorXd::Constant(n, kInf);
    if (p.lower.size() != n || p.upper.size() != n || (p.lower.array() > p.upper.array()).any())
        throw DomainError("constrained_local_search: inconsistent bounds");

    const Evaluator eval(p, settings);
    Point cur = eval.values(clamp_box(x0, p.lower, p.upper));
    eval.gradients(cur);

    const Eigen::Index me = cur.h.size();
    const Eigen::Index mi = cur.g.size();
    std::vector<Eigen::Index> lower_idx;
    std::vector<Eigen::Index> upper_idx;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::isfinite(p.lower(i))) lower_idx.push_back(i);
        if (std::isfinite(p.upper(i))) upper_idx.push_back(i);
    }
    const Eigen::Index nb = static_cast<Eigen::Index>(lower_idx.size() + upper_idx.size());

    SearchResult res;
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n);
    double penalty = 1.0;
    res.merit_trace.push_back(cur.f + penalty * cur.violation());
    res.objective_trace.push_back(cur.f);
    res.status = "max_iterations";

    for (int iter = 1; iter <= settings.max_iterations; ++iter) {
        QpProblem qp;
        qp.G = b;
        qp.a = cur.grad;
        qp.Ce = cur.jh.transpose();
        qp.Ci.resize(n, mi + nb);
        qp.ci.resize(mi + nb);
        qp.Ci.leftCols(mi) = cur.jg.transpose();
        Eigen::Index col = mi;
        for (Eigen::Index i : lower_idx) {
            qp.Ci.col(col).setZero();
            qp.Ci(i, col) = 1.0;
            qp.ci(col++) = cur.x(i) - p.lower(i);
        }
        for (Eigen::Index i : upper_idx) {
            qp.Ci.col(col).setZero();
            qp.Ci(i, col) = -1.0;
            qp.ci(col++) = p.upper(i) - cur.x(i);
        }

        QpSolution sol;
        double xi = -1.0;
        for (double relax : kRelaxation) {
            qp.ce = relax * cur.h;
            for (Eigen::Index j = 0; j < mi; ++j) qp.ci(j) = cur.g(j) < 0.0 ? relax * cur.g(j) : cur.g(j);
            try {
                sol = solve_qp(qp);
                xi = relax;
                break;
            } catch (const InfeasibleError&) {
            } catch (const NumericError&) {
            }
        }
        if (xi < 0.0) {
            res.status = "subproblem_infeasible";
            break;
        }
        if (xi < 1.0) res.restoration_used = true;

        const Eigen::VectorXd d = sol.x;
        res.kkt_residual = (b * d).lpNorm<Eigen::Infinity>();
        const double viol = cur.max_violation();
        if (viol <= settings.constraint_tol &&
            (d.lpNorm<Eigen::Infinity>() <= 1e-10 || res.kkt_residual < settings.kkt_tol * 1e-2)) {
            res.converged = true;
            res.status = "converged_kkt";
            break;
        }

        double lambda_max = 0.0;
        if (me > 0) lambda_max = std::max(lambda_max, sol.lambda_eq.lpNorm<Eigen::Infinity>());
        if (mi > 0) lambda_max = std::max(lambda_max, sol.lambda_ineq.head(mi).lpNorm<Eigen::Infinity>());
        penalty = std::max(penalty, 1.5 * lambda_max + 1e-3);

        const double merit0 = cur.f + penalty * cur.violation();
        const double slope = cur.grad.dot(d) - penalty * xi * cur.violation();
        double alpha = 1.0;
        Point next;
        bool accepted = false;
        while (alpha >= 1e-10) {
            next = eval.values(clamp_box(cur.x + alpha * d, p.lower, p.upper));
            const double merit = next.f + penalty * next.violation();
            const double target = slope < 0.0 ? merit0 + 1e-4 * alpha * slope : merit0;
            if (merit <= target) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            res.status = "line_search_stalled";
            res.converged = viol <= settings.constraint_tol && res.kkt_residual < settings.kkt_tol;
            break;
        }
        eval.gradients(next);

        // Damped BFGS on the Lagrangian gradient; bound multipliers cancel.
        const Eigen::VectorXd s = next.x - cur.x;
        Eigen::VectorXd lam_g_old = cur.grad;
        Eigen::VectorXd lam_g_new = next.grad;
        if (me > 0) {
            lam_g_old -= cur.jh.transpose() * sol.lambda_eq;
            lam_g_new -= next.jh.transpose() * sol.lambda_eq;
        }
        if (mi > 0) {
            lam_g_old -= cur.jg.transpose() * sol.lambda_ineq.head(mi);
            lam_g_new -= next.jg.transpose() * sol.lambda_ineq.head(mi);
        }
        Eigen::VectorXd y = lam_g_new - lam_g_old;
        const Eigen::VectorXd bs = b * s;
        const double sbs = s.dot(bs);
        if (sbs > 1e-16) {
            double sy = s.dot(y);
            if (sy < 0.2 * sbs) {
                const double theta = 0.8 * sbs / (sbs - sy);
                y = theta * y + (1.0 - theta) * bs;
                sy = s.dot(y);
            }
            b += y * y.transpose() / sy - bs * bs.transpose() / sbs;
            b = 0.5 * (b + b.transpose());
        }

        const double df = std::abs(next.f - cur.f);
        cur = std::move(next);
        res.iterations = iter;
        res.merit_trace.push_back(cur.f + penalty * cur.violation());
        res.objective_trace.push_back(cur.f);
        if (cur.max_violation() <= settings.constraint_tol && df < settings.convergence_tol) {
            res.converged = true;
            res.status = "converged_objective";
            break;
        }
    }

    res.x = cur.x;
    res.objective = cur.f;
    for (Eigen::Index i = 0; i < me; ++i) res.equality_residuals.push_back(std::abs(cur.h(i)));
    for (Eigen::Index j = 0; j < mi; ++j) res.inequality_residuals.push_back(std::max(0.0, -cur.g(j)));
    res.feasible = cur.max_violation() <= settings.constraint_tol;
    return res;
}

}  // namespace rsma
